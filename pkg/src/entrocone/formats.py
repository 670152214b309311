"""File formats.

Everything is plain text and deterministic: identical inputs produce
byte-identical output files (fixed key order, fixed number formatting, no
timestamps), which the test suite pins.

* scenarios, distributions, marginal models, partial vectors and Bayes nets
  are JSON documents; probabilities and rank values are strings like "3/4"
  (decimal strings are also accepted on input and parsed exactly);
* inequality systems are line-oriented text, one row per line in the form
  ``2*H(A1A2) - 1*H(A1) ... >= 0`` with integer coefficients and subsets as
  label strings joined without separators, preceded by comment headers
  recording n, labels, coordinate order and provenance;
* a second exporter writes the PORTA-compatible ``.ieq`` layout for
  cross-checking against standard polyhedral tools.
* conditional-independence constraints are lines ``I(S:T|R)=0`` with
  comma-separated labels in each part.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cones import BayesNet, CIConstraint
from .distributions import JointDistribution, MarginalModel, PartialRankVector
from .errors import DomainError
from .linear import EQ, GE, InequalitySystem, LinearInequality
from .subsets import (
    Scenario,
    default_labels,
    downward_close,
    pack,
    sort_subsets,
    subset_label,
    unpack,
)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def format_number(x) -> str:
    """Rationals as p/q (or plain integer), approximate values with 12
    significant digits."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return f"{float(x):.12g}"


def parse_number(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        return Fraction(repr(s))
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad number {s!r}: {exc}") from None


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def scenario_to_obj(scenario: Scenario) -> dict:
    return {
        "n": scenario.n,
        "labels": list(scenario.labels),
        "generators": [
            [scenario.labels[e - 1] for e in unpack(g)]
            for g in scenario.generators
        ],
    }


def scenario_from_obj(obj: Mapping) -> Scenario:
    try:
        n = int(obj["n"])
        generators = obj["generators"]
    except KeyError as exc:
        raise DomainError(f"scenario document missing field {exc.args[0]!r}") from None
    labels = tuple(obj.get("labels") or default_labels(n))
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    masks = []
    for gen in generators:
        elems = []
        for item in gen:
            if isinstance(item, int):
                elems.append(item)
            elif item in index:
                elems.append(index[item])
            else:
                raise DomainError(f"unknown variable {item!r} in generators")
        masks.append(pack(elems, n))
    return downward_close(masks, n, labels=labels)


# ---------------------------------------------------------------------------
# distributions and models
# ---------------------------------------------------------------------------

def _member_key(mask: int, labels: Sequence[str]) -> str:
    return ",".join(labels[e - 1] for e in unpack(mask))


def _parse_member_key(key: str, labels: Sequence[str]) -> int:
    if key == "":
        return 0
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    try:
        return pack(index[part] for part in key.split(","))
    except KeyError as exc:
        raise DomainError(f"unknown variable {exc.args[0]!r} in key {key!r}") from None


def distribution_to_obj(dist: JointDistribution, labels: Sequence[str]) -> dict:
    names = [labels[v - 1] for v in dist.variables]
    return {
        "variables": names,
        "alphabets": {
            labels[v - 1]: list(dist.alphabets[v]) for v in dist.variables
        },
        "table": {
            ",".join(str(o) for o in outcome): format_number(p)
            for outcome, p in dist.probabilities.items()
        },
    }


def distribution_from_obj(
    obj: Mapping, labels: Sequence[str] | None = None,
    variable_ids: Mapping[str, int] | None = None,
) -> tuple[JointDistribution, tuple[str, ...]]:
    """Parse a distribution document.

    Standalone files name their own variables (becoming ids 1..k in file
    order); inside a model the scenario's label->id map is supplied.
    Returns the distribution and the labels of its variables in id order.
    """
    try:
        names = list(obj["variables"])
        table = obj["table"]
    except KeyError as exc:
        raise DomainError(f"distribution document missing {exc.args[0]!r}") from None
    alphabets_in = obj.get("alphabets", {})
    if variable_ids is None:
        variable_ids = {name: k + 1 for k, name in enumerate(names)}
    ids = []
    for name in names:
        if name not in variable_ids:
            raise DomainError(f"variable {name!r} not in scenario")
        ids.append(variable_ids[name])
    order = sorted(range(len(ids)), key=lambda k: ids[k])
    variables = tuple(ids[k] for k in order)
    alphabets = {}
    for name, vid in zip(names, ids):
        if name not in alphabets_in:
            raise DomainError(f"missing alphabet for variable {name!r}")
        alphabets[vid] = tuple(alphabets_in[name])
    probs = {}
    for key, val in table.items():
        parts = key.split(",") if key != "" else []
        if len(parts) != len(names):
            raise DomainError(f"outcome key {key!r} has wrong arity")
        outcome = tuple(parts[k] for k in order)
        probs[outcome] = probs.get(outcome, Fraction(0)) + parse_number(val)
    dist = JointDistribution(variables, alphabets, probs)
    inv = {v: name for name, v in zip(names, ids)}
    return dist, tuple(inv[v] for v in variables)


def model_to_obj(model: MarginalModel) -> dict:
    labels = model.scenario.labels
    return {
        "scenario": scenario_to_obj(model.scenario),
        "tables": {
            _member_key(g, labels): distribution_to_obj(model.tables[g], labels)
            for g in model.scenario.generators
        },
    }


def model_from_obj(obj: Mapping) -> MarginalModel:
    try:
        scenario = scenario_from_obj(obj["scenario"])
        tables_in = obj["tables"]
    except KeyError as exc:
        raise DomainError(f"model document missing {exc.args[0]!r}") from None
    ids = {lab: i + 1 for i, lab in enumerate(scenario.labels)}
    tables = {}
    for key, doc in tables_in.items():
        mask = _parse_member_key(key, scenario.labels)
        dist, _ = distribution_from_obj(doc, variable_ids=ids)
        if dist.mask != mask:
            raise DomainError(f"table {key!r} is over different variables")
        tables[mask] = dist
    return MarginalModel(scenario, tables)


# ---------------------------------------------------------------------------
# partial vectors
# ---------------------------------------------------------------------------

def vector_to_obj(vector: PartialRankVector) -> dict:
    labels = vector.scenario.labels
    return {
        "scenario": scenario_to_obj(vector.scenario),
        "values": {
            _member_key(m, labels): format_number(vector.values[m])
            for m in vector.scenario.members_sorted()
            if m
        },
    }


def vector_from_obj(obj: Mapping) -> PartialRankVector:
    try:
        scenario = scenario_from_obj(obj["scenario"])
        values_in = obj["values"]
    except KeyError as exc:
        raise DomainError(f"vector document missing {exc.args[0]!r}") from None
    values = {}
    for key, val in values_in.items():
        values[_parse_member_key(key, scenario.labels)] = parse_number(val)
    return PartialRankVector(scenario, values)


# ---------------------------------------------------------------------------
# inequality systems (native text format)
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"\s*([+-]?)\s*(\d+)\*H\(([^)]*)\)")


def system_to_text(
    system: InequalitySystem,
    labels: Sequence[str] | None = None,
    source: str = "entrocone",
) -> str:
    labels = tuple(labels or default_labels(system.n))
    lines = [
        f"# n = {system.n}",
        f"# labels = {' '.join(labels)}",
        f"# coordinates = {' '.join(subset_label(m, labels) for m in system.coordinates)}",
        f"# source = {source}",
    ]
    lines.extend(row.format(labels) for row in system.rows)
    return "\n".join(lines) + "\n"


def _tokenize_subset(body: str, labels: Sequence[str]) -> int:
    """Parse a separator-less label string into a subset mask.

    All tokenizations into distinct labels are enumerated; the parse must
    name a unique subset (different tokenizations giving the same set are
    fine).
    """
    if body in ("", "{}"):
        return 0
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    results: set[int] = set()

    def walk(pos: int, used: int):
        if pos == len(body):
            results.add(used)
            return
        for lab, e in index.items():
            bit = 1 << (e - 1)
            if not used & bit and body.startswith(lab, pos):
                walk(pos + len(lab), used | bit)

    walk(0, 0)
    if len(results) != 1:
        raise DomainError(f"subset label {body!r} is {'ambiguous' if results else 'unparseable'}")
    return results.pop()


def parse_inequality_line(line: str, labels: Sequence[str]) -> LinearInequality:
    if "==" in line:
        lhs, sense = line.split("==")[0], EQ
    elif ">=" in line:
        lhs, sense = line.split(">=")[0], GE
    else:
        raise DomainError(f"row without sense: {line!r}")
    coeffs: dict[int, int] = {}
    pos = 0
    stripped = lhs.strip()
    if stripped == "0":
        return LinearInequality({}, sense)
    while pos < len(stripped):
        m = _TERM_RE.match(stripped, pos)
        if not m:
            raise DomainError(f"cannot parse term at {stripped[pos:]!r}")
        sign, coef, body = m.groups()
        mask = _tokenize_subset(body, labels)
        value = int(coef) * (-1 if sign == "-" else 1)
        coeffs[mask] = coeffs.get(mask, 0) + value
        pos = m.end()
    return LinearInequality(coeffs, sense)


def system_from_text(text: str) -> tuple[InequalitySystem, tuple[str, ...]]:
    n = None
    labels: tuple[str, ...] | None = None
    coordinates: list[int] | None = None
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n ="):
                n = int(body[3:].strip())
            elif body.startswith("labels ="):
                labels = tuple(body[len("labels ="):].split())
            elif body.startswith("coordinates ="):
                if labels is None:
                    raise DomainError("coordinates header before labels header")
                coordinates = [
                    _tokenize_subset(tok, labels) if tok != "{}" else 0
                    for tok in body[len("coordinates ="):].split()
                ]
            continue
        if labels is None or n is None:
            raise DomainError("inequality file must declare n and labels first")
        rows.append(parse_inequality_line(line, labels))
    if n is None or labels is None:
        raise DomainError("inequality file missing headers")
    if coordinates is None:
        coords = sort_subsets({m for r in rows for m in r.support})
    else:
        coords = coordinates
    return InequalitySystem(n, coords, rows), labels


# ---------------------------------------------------------------------------
# PORTA .ieq layout
# ---------------------------------------------------------------------------

def system_to_ieq(
    system: InequalitySystem,
    labels: Sequence[str] | None = None,
    source: str = "entrocone",
) -> str:
    labels = tuple(labels or default_labels(system.n))
    coords = list(system.coordinates)
    pos = {m: k + 1 for k, m in enumerate(coords)}
    lines = [
        f"DIM = {len(coords)}",
        "",
        "COMMENT",
        f"n = {system.n}",
        f"labels = {' '.join(labels)}",
        f"coordinates = {' '.join(subset_label(m, labels) for m in coords)}",
        f"source = {source}",
        "",
        "INEQUALITIES_SECTION",
    ]
    for k, row in enumerate(system.rows, start=1):
        terms = "".join(
            f"{'+' if c > 0 else '-'}{abs(c)}x{pos[m]}" for m, c in row.coeffs.items()
        )
        op = ">=" if row.sense == GE else "=="
        lines.append(f"( {k}) {terms} {op} 0")
    lines.extend(["", "END"])
    return "\n".join(lines) + "\n"


_IEQ_TERM_RE = re.compile(r"([+-])(\d*)x(\d+)")


def system_from_ieq(text: str) -> tuple[InequalitySystem, tuple[str, ...]]:
    """Parse the ``.ieq`` layout written by :func:`system_to_ieq` (the
    COMMENT block supplies the subset meaning of each variable)."""
    n = None
    labels: tuple[str, ...] | None = None
    coords: list[int] | None = None
    rows = []
    in_ineqs = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("DIM"):
            continue
        if line == "COMMENT":
            continue
        if line == "INEQUALITIES_SECTION":
            in_ineqs = True
            continue
        if line == "END":
            break
        if not in_ineqs:
            if line.startswith("n ="):
                n = int(line[3:].strip())
            elif line.startswith("labels ="):
                labels = tuple(line[len("labels ="):].split())
            elif line.startswith("coordinates ="):
                if labels is None:
                    raise DomainError("coordinates before labels in COMMENT")
                coords = [_tokenize_subset(t, labels) for t in line[len("coordinates ="):].split()]
            continue
        if n is None or coords is None:
            raise DomainError(".ieq file lacks the entrocone COMMENT block")
        body = line.split(")", 1)[1] if ")" in line else line
        if "==" in body:
            sense, lhs = EQ, body.split("==")[0]
        elif ">=" in body:
            sense, lhs = GE, body.split(">=")[0]
        elif "<=" in body:
            sense, lhs = GE, None
            coeffs = {}
            for sign, num, idx in _IEQ_TERM_RE.findall(body.split("<=")[0].replace(" ", "")):
                c = int(num) if num else 1
                coeffs[coords[int(idx) - 1]] = -c if sign == "+" else c
            rows.append(LinearInequality(coeffs, sense))
            continue
        else:
            raise DomainError(f"cannot parse .ieq row {line!r}")
        coeffs = {}
        for sign, num, idx in _IEQ_TERM_RE.findall(lhs.replace(" ", "")):
            c = int(num) if num else 1
            coeffs[coords[int(idx) - 1]] = c if sign == "+" else -c
        rows.append(LinearInequality(coeffs, sense))
    if n is None or labels is None or coords is None:
        raise DomainError(".ieq file lacks the entrocone COMMENT block")
    return InequalitySystem(n, coords, rows), labels


# ---------------------------------------------------------------------------
# conditional-independence constraint files
# ---------------------------------------------------------------------------

_CI_RE = re.compile(r"I\(([^:]+):([^|)]+)(?:\|([^)]*))?\)\s*=\s*0")


def ci_to_text(constraints: Iterable[CIConstraint], labels: Sequence[str]) -> str:
    return "".join(c.format(labels) + "\n" for c in constraints)


def ci_from_text(text: str, labels: Sequence[str]) -> tuple[CIConstraint, ...]:
    index = {lab: i + 1 for i, lab in enumerate(labels)}

    def part(s: str) -> int:
        s = s.strip()
        if not s:
            return 0
        try:
            return pack(index[tok.strip()] for tok in s.split(","))
        except KeyError as exc:
            raise DomainError(f"unknown variable {exc.args[0]!r} in CI file") from None

    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _CI_RE.fullmatch(line)
        if not m:
            raise DomainError(f"cannot parse CI line {line!r}")
        s, t, r = m.group(1), m.group(2), m.group(3) or ""
        out.append(CIConstraint(part(s), part(t), part(r)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Bayes nets
# ---------------------------------------------------------------------------

def bayesnet_to_obj(net: BayesNet, observed: int = 0, labels: Sequence[str] | None = None) -> dict:
    labels = tuple(labels or default_labels(net.n))
    obj = {
        "n": net.n,
        "labels": list(labels),
        "edges": [[labels[u - 1], labels[v - 1]] for u, v in net.edges],
    }
    if observed:
        obj["observed"] = [labels[e - 1] for e in unpack(observed)]
    return obj


def bayesnet_from_obj(obj: Mapping) -> tuple[BayesNet, int, tuple[str, ...]]:
    try:
        edges_in = obj["edges"]
    except KeyError:
        raise DomainError("bayes net document missing 'edges'") from None
    if "n" in obj:
        n = int(obj["n"])
    else:
        n = max(
            (v for e in edges_in for v in e if isinstance(v, int)), default=0
        )
    labels = tuple(obj.get("labels") or default_labels(n))
    index = {lab: i + 1 for i, lab in enumerate(labels)}

    def vid(x) -> int:
        if isinstance(x, int):
            return x
        if x in index:
            return index[x]
        raise DomainError(f"unknown vertex {x!r}")

    edges = tuple((vid(u), vid(v)) for u, v in edges_in)
    net = BayesNet(n, edges)
    observed = pack((vid(x) for x in obj.get("observed", [])), n)
    return net, observed, labels


# ---------------------------------------------------------------------------
# document-level helpers
# ---------------------------------------------------------------------------

def detect_kind(obj: Mapping) -> str:
    if "tables" in obj:
        return "model"
    if "values" in obj:
        return "vector"
    if "table" in obj:
        return "distribution"
    if "edges" in obj:
        return "bayesnet"
    if "generators" in obj:
        return "scenario"
    raise DomainError("unrecognized document")


def dumps(kind: str, value) -> str:
    if kind == "scenario":
        return _dump_json(scenario_to_obj(value))
    if kind == "model":
        return _dump_json(model_to_obj(value))
    if kind == "vector":
        return _dump_json(vector_to_obj(value))
    if kind == "bayesnet":
        net, observed = value
        return _dump_json(bayesnet_to_obj(net, observed))
    if kind == "inequality":
        n, labels, rows = value
        coords = sort_subsets({m for r in rows for m in r.support})
        system = InequalitySystem(n, coords, rows)
        return system_to_text(system, labels, source=f"entrocone fixture")
    raise DomainError(f"cannot serialize kind {kind!r}")


def load_json(path: str) -> Mapping:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: not valid JSON ({exc})") from None


def read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
