"""Command-line surface.

Subcommands: project, check, extend, prove, marginal-lp, entropy, fixture,
convert.  Exit codes: 0 = passes / non-contextual / provable / feasible,
1 = violation found, 2 = error, 3 = elimination budget exhausted.  All output
is deterministic; ``--json`` switches reports to machine-readable form.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .analytic import partial_polymatroid_system
from .cones import extend_partial, project_cone, prove_shannon
from .distributions import (
    ENTROPY_TOL,
    entropy_vector,
    marginal_entropy_vector,
    subset_entropy,
)
from .errors import BudgetExceededError, EntroconeError
from .fixtures import fixture_names, get_fixture
from .formats import (
    bayesnet_from_obj,
    ci_from_text,
    detect_kind,
    distribution_from_obj,
    dumps,
    format_number,
    load_json,
    model_from_obj,
    read_text,
    scenario_from_obj,
    system_from_ieq,
    system_from_text,
    system_to_ieq,
    system_to_text,
    vector_from_obj,
    write_text,
)
from .linear import InequalitySystem
from .marginal import DEFAULT_OUTCOME_CAP, marginal_lp
from .polyhedra import DEFAULT_FM_BUDGET
from .subsets import all_subsets, default_labels, subset_label, unpack

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


@dataclass
class RunConfig:
    tolerance: float = ENTROPY_TOL
    budget: int = DEFAULT_FM_BUDGET
    threads: int = 1
    redundancy: str = "pairwise"
    as_json: bool = False

    def __post_init__(self):
        if self.tolerance <= 0:
            raise EntroconeError("tolerance must be positive")
        if self.budget <= 0:
            raise EntroconeError("budget must be positive")
        if self.threads < 1:
            raise EntroconeError("threads must be at least 1")


def _config(args) -> RunConfig:
    return RunConfig(
        tolerance=getattr(args, "tolerance", ENTROPY_TOL),
        budget=getattr(args, "budget", DEFAULT_FM_BUDGET),
        threads=getattr(args, "threads", 1),
        redundancy=getattr(args, "redundancy", "pairwise"),
        as_json=getattr(args, "json", False),
    )


def _emit(text: str, out):
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _report(obj: dict, cfg: RunConfig) -> None:
    if cfg.as_json:
        sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")
        return
    for line in obj["lines"]:
        sys.stdout.write(line + "\n")


def _load_ci(path, labels):
    if not path:
        return ()
    return ci_from_text(read_text(path), labels)


def _load_system(path):
    text = read_text(path)
    if text.lstrip().startswith("DIM"):
        return system_from_ieq(text)
    return system_from_text(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_project(args) -> int:
    cfg = _config(args)
    scenario = scenario_from_obj(load_json(args.scenario))
    constraints = _load_ci(args.ci, scenario.labels)
    system = project_cone(
        scenario.n,
        scenario,
        constraints,
        redundancy=cfg.redundancy,
        budget=cfg.budget,
        threads=cfg.threads,
    )
    source = f"entrocone project n={scenario.n} redundancy={cfg.redundancy}"
    if constraints:
        source += f" ci={len(constraints)}"
    text = system_to_text(system, scenario.labels, source=source)
    _emit(text, args.output)
    if args.export == "porta":
        if not args.output:
            raise EntroconeError("--export porta needs -o/--output")
        write_text(args.output + ".ieq", system_to_ieq(system, scenario.labels, source=source))
    return EXIT_OK


def _values_for_check(args, cfg):
    """Load a model (entropies, tolerant) or a partial vector (exact when
    rational) for `check`/`extend`."""
    obj = load_json(args.target)
    kind = detect_kind(obj)
    if kind == "model":
        model = model_from_obj(obj)
        vector = marginal_entropy_vector(model)
        return vector, cfg.tolerance, "entropies of " + args.target
    if kind == "vector":
        vector = vector_from_obj(obj)
        return vector, (0 if vector.exact else cfg.tolerance), args.target
    raise EntroconeError(f"{args.target}: expected a model or partial-vector document")


def cmd_check(args) -> int:
    cfg = _config(args)
    vector, tol, described = _values_for_check(args, cfg)
    system, labels = _load_system(args.inequalities)
    violations = system.violations(vector.values, tol)
    lines = [f"checking {described} against {len(system.rows)} rows (tolerance {tol})"]
    for row, lhs in violations:
        lines.append(f"VIOLATED: {row.format(labels)}   slack {format_number(lhs)}")
    verdict = "CONTEXTUAL" if violations else "PASSES"
    lines.append(verdict)
    _report(
        {
            "command": "check",
            "verdict": verdict,
            "violations": [
                {"row": row.format(labels), "slack": format_number(lhs)}
                for row, lhs in violations
            ],
            "lines": lines,
        },
        cfg,
    )
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_extend(args) -> int:
    cfg = _config(args)
    vector = vector_from_obj(load_json(args.vector))
    n = args.n or vector.scenario.n
    constraints = _load_ci(args.ci, default_labels(n))
    values = {}
    for m, v in vector.values.items():
        values[m] = v if isinstance(v, (int, Fraction)) else Fraction(str(v))
    result = extend_partial(values, n, constraints)
    labels = vector.scenario.labels if vector.scenario.n == n else default_labels(n)
    if result.feasible:
        lines = ["FEASIBLE: extends to a polymatroid on all subsets"]
        ext = {
            subset_label(m, labels): format_number(result.extension[m])
            for m in all_subsets(n)
        }
        lines.extend(f"  f({k}) = {v}" for k, v in ext.items())
        _report(
            {"command": "extend", "verdict": "FEASIBLE", "extension": ext, "lines": lines},
            cfg,
        )
        return EXIT_OK
    lines = ["INFEASIBLE: the values violate a derived valid inequality"]
    lines.append(f"  derived: {result.derived.format(labels)}")
    for row, y in result.combination:
        lines.append(f"  {format_number(y)} * [{row.format(labels)}]")
    _report(
        {
            "command": "extend",
            "verdict": "INFEASIBLE",
            "derived": result.derived.format(labels),
            "combination": [
                {"multiplier": format_number(y), "row": row.format(labels)}
                for row, y in result.combination
            ],
            "lines": lines,
        },
        cfg,
    )
    return EXIT_VIOLATION


def cmd_prove(args) -> int:
    cfg = _config(args)
    system, labels = _load_system(args.inequalities)
    n = args.n or system.n
    constraints = _load_ci(args.ci, labels if len(labels) == n else default_labels(n))
    lines = []
    rows_out = []
    all_provable = True
    for row in system.rows:
        result = prove_shannon(row, n, constraints)
        if result.provable:
            lines.append(f"PROVABLE: {row.format(labels)}")
            cert = [
                {"multiplier": format_number(lam), "row": r.format(labels)}
                for r, lam in result.combination
            ]
            lines.extend(f"  {c['multiplier']} * [{c['row']}]" for c in cert)
            rows_out.append(
                {"row": row.format(labels), "verdict": "PROVABLE", "combination": cert}
            )
        else:
            all_provable = False
            lines.append(f"NOT PROVABLE: {row.format(labels)}")
            ray = {
                subset_label(m, labels): format_number(v)
                for m, v in sorted(result.ray.items())
                if m
            }
            lines.append(f"  violating polymatroid ray: {ray}")
            rows_out.append(
                {"row": row.format(labels), "verdict": "NOT PROVABLE", "ray": ray}
            )
    verdict = "PROVABLE" if all_provable else "NOT PROVABLE"
    lines.append(verdict)
    _report(
        {"command": "prove", "verdict": verdict, "rows": rows_out, "lines": lines},
        cfg,
    )
    return EXIT_OK if all_provable else EXIT_VIOLATION


def cmd_marginal_lp(args) -> int:
    cfg = _config(args)
    model = model_from_obj(load_json(args.model))
    result = marginal_lp(model, cap=args.cap)
    labels = model.scenario.labels
    if not result.contextual:
        lines = ["NON-CONTEXTUAL: a global joint distribution exists"]
        joint = {
            ",".join(str(o) for o in outcome): format_number(p)
            for outcome, p in result.joint.probabilities.items()
        }
        lines.extend(f"  P({k}) = {v}" for k, v in joint.items())
        _report(
            {"command": "marginal-lp", "verdict": "NON-CONTEXTUAL", "joint": joint, "lines": lines},
            cfg,
        )
        return EXIT_OK
    lines = ["CONTEXTUAL: no joint distribution reproduces the tables"]
    cert = []
    for label, y in result.certificate:
        if label == ("mass",):
            desc = "total mass"
        else:
            mask, outcome = label
            desc = f"P_{subset_label(mask, labels)}({','.join(map(str, outcome))})"
        cert.append({"constraint": desc, "multiplier": format_number(y)})
        lines.append(f"  {format_number(y)} * [{desc}]")
    _report(
        {"command": "marginal-lp", "verdict": "CONTEXTUAL", "certificate": cert, "lines": lines},
        cfg,
    )
    return EXIT_VIOLATION


def cmd_entropy(args) -> int:
    cfg = _config(args)
    dist, names = distribution_from_obj(load_json(args.distribution))
    k = len(dist.variables)
    values = {}
    for m in all_subsets(k):
        sub = 0
        for i, v in enumerate(dist.variables):
            if m & (1 << i):
                sub |= 1 << (v - 1)
        values[subset_label(m, names)] = format_number(
            0 if m == 0 else subset_entropy(dist, sub)
        )
    lines = [f"H({k}) = {v}" for k, v in values.items()]
    _report(
        {"command": "entropy", "entropies": values, "lines": lines},
        cfg,
    )
    return EXIT_OK


def cmd_fixture(args) -> int:
    kind, value = get_fixture(args.name)
    _emit(dumps(kind, value), args.output)
    return EXIT_OK


def cmd_convert(args) -> int:
    text = read_text(args.input)
    if text.lstrip().startswith("DIM"):
        system, labels = system_from_ieq(text)
    else:
        system, labels = system_from_text(text)
    target = args.to
    if target is None:
        target = "porta" if args.output.endswith(".ieq") else "text"
    source = f"entrocone convert {args.input}"
    if target == "porta":
        out = system_to_ieq(system, labels, source=source)
    else:
        out = system_to_text(system, labels, source=source)
    write_text(args.output, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrocone",
        description="Entropic inequalities for marginal scenarios: project the "
        "polymatroid cone, prove Shannon-type derivability, and decide "
        "contextuality of marginal models.",
    )
    parser.add_argument("--version", action="version", version=f"entrocone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, tolerance=False, budget=False):
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--threads", type=int, default=1, help="parallel map degree")
        if tolerance:
            p.add_argument(
                "--tolerance", type=float, default=ENTROPY_TOL,
                help="tolerance in bits for entropy-valued data",
            )
        if budget:
            p.add_argument(
                "--budget", type=int, default=DEFAULT_FM_BUDGET,
                help="cap on rows derived during elimination",
            )

    p = sub.add_parser("project", help="facets of the cone projected onto a scenario")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--ci", help="conditional-independence constraint file")
    p.add_argument("-o", "--output", help="write the inequality file here")
    p.add_argument("--redundancy", choices=["pairwise", "exact"], default="pairwise",
                   help="per-step redundancy policy (a final exact pass always runs)")
    p.add_argument("--export", choices=["porta"], help="also write <output>.ieq")
    common(p, budget=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("check", help="evaluate an inequality file on a model or vector")
    p.add_argument("target", help="marginal-model or partial-vector JSON file")
    p.add_argument("inequalities", help="inequality file")
    common(p, tolerance=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extend", help="decide extendability of a partial vector")
    p.add_argument("vector", help="partial-vector JSON file")
    p.add_argument("--n", type=int, help="ground-set size (default: the scenario's)")
    p.add_argument("--ci", help="conditional-independence constraint file")
    common(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("prove", help="Shannon-type derivability of candidate rows")
    p.add_argument("inequalities", help="inequality file with candidate rows")
    p.add_argument("--n", type=int, help="ground-set size (default: the file's)")
    p.add_argument("--ci", help="conditional-independence constraint file")
    common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("marginal-lp", help="exact joint-distribution feasibility")
    p.add_argument("model", help="marginal-model JSON file")
    p.add_argument("--cap", type=int, default=DEFAULT_OUTCOME_CAP,
                   help="largest admissible joint outcome space")
    common(p)
    p.set_defaults(func=cmd_marginal_lp)

    p = sub.add_parser("entropy", help="entropy vector of a distribution file")
    p.add_argument("distribution", help="distribution JSON file")
    common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("fixture", help="emit a named reference object")
    p.add_argument("name", help="one of: " + ", ".join(fixture_names()))
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("convert", help="translate inequality files (text/PORTA .ieq)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--to", choices=["text", "porta"],
                   help="target format (default: by output extension)")
    p.set_defaults(func=cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except EntroconeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
