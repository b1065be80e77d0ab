"""Command line verification front end.

One suite per invocation. Reports go to stdout as canonical JSON (or to
--out); a short human-readable line per check goes to stderr. Exit code
0 means every check passed, 1 means some verification check failed,
2 is a usage problem, 3 an I/O or table parse problem.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

from .core import check_axioms, check_identities
from .errors import (
    AxiomViolationError,
    ChainConditionError,
    ResourceLimitError,
    TableFormatError,
    UsageError,
)
from .models import EinsteinModel, MobiusModel, check_strong_base
from .prenorm import (
    QuotientMetricSpace,
    build_dyadic,
    check_metric_properties,
    check_prenorm_properties,
    finite_chain,
    make_prenorm,
    parse_chain_spec,
    radial_chain,
    validate_admissible_chain,
)
from .report import CheckResult, VerificationReport, canonical_json
from .sampling import Sampler, ToleranceConfig
from .tables import (
    BUILTIN_TABLE_NAMES,
    TableModel,
    builtin_table,
    coset_partition,
    enumerate_subgyrogroups,
    is_L_subgyrogroup,
    load_table,
    product_model,
    search_gyrogroups,
    validate_table,
)

SUITES = {
    "axioms": "gyrogroup axioms on a sampled or exhaustive carrier",
    "identities": "derived cancellation and decomposition identities",
    "strong-base": "gyration stability of balls, norms and commuted sums",
    "prenorm": "dyadic scale family: sandwich, invariance, subadditivity",
    "metric": "pseudometric and quotient separation axioms",
    "admissible": "level-by-level double-sum admissibility of a chain",
    "table-validate": "exhaustive axiom check of a finite table",
    "subgyrogroups": "enumerate closed subsets of a finite table",
    "cosets": "left coset partition induced by an invariant subset",
    "search": "exhaustive search for tables of a small order",
}


@dataclass
class RunConfig:
    suite: str
    model: str = "mobius"
    samples: int = 10000
    seed: int = 42
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)
    chain: dict | None = None
    subgyrogroup: list | None = None
    depth: int | None = None
    order: int | None = None
    max_results: int | None = None


def _resolve_table(token: str):
    if token.lower() in BUILTIN_TABLE_NAMES or (
        token.lower().startswith("z") and token[1:].isdigit()
    ):
        return builtin_table(token)
    return load_table(token)


def _resolve_model(spec: str):
    spec = spec.strip()
    if spec == "mobius":
        return MobiusModel()
    if spec == "einstein":
        return EinsteinModel()
    if spec.startswith("table:"):
        return TableModel(_resolve_table(spec[len("table:"):]))
    if spec.startswith("product:"):
        body = spec[len("product:"):]
        if "+" not in body:
            raise UsageError("product model needs the form product:<a>+<b>")
        left, right = (_resolve_operand(s.strip()) for s in body.split("+", 1))
        return product_model(left, right)
    raise UsageError(
        f"unknown model {spec!r}; expected mobius, einstein, "
        "table:<name-or-path> or product:<a>+<b>"
    )


def _resolve_operand(spec: str):
    """Product factors may name a table without the table: prefix."""
    if spec in ("mobius", "einstein") or spec.startswith(("table:", "product:")):
        return _resolve_model(spec)
    return TableModel(_resolve_table(spec))


def _require_table(cfg: RunConfig):
    if not cfg.model.startswith("table:"):
        raise UsageError(f"suite {cfg.suite!r} needs --model table:<name-or-path>")
    return _resolve_table(cfg.model[len("table:"):])


def _parse_subgyrogroup(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"--subgyrogroup expects comma-separated indices: {exc}") from exc


def _build_chain(cfg: RunConfig, model):
    depth = cfg.depth if cfg.depth is not None else 24
    if cfg.chain is not None:
        spec = cfg.chain
        if spec["kind"] == "radial_rapidity":
            if model.is_exact:
                raise UsageError("radial chains need a continuous model")
            return radial_chain(model, spec["t0"], spec["ratio"], spec["depth"])
        table = _resolve_table(spec["table"])
        return finite_chain(TableModel(table), spec["subgyrogroup"])
    if model.is_exact:
        if cfg.subgyrogroup is None:
            raise UsageError("finite chains need --subgyrogroup or --chain")
        return finite_chain(model, cfg.subgyrogroup)
    return radial_chain(model, depth=depth)


def _structure_failure(suite, model_name, exc):
    report = VerificationReport(suite=suite, model=model_name, tolerances={})
    report.checks.append(
        CheckResult("table_structure", False, 1.0, "exhaustive", witness={"error": str(exc)})
    )
    return report


def run_suite(cfg: RunConfig):
    """Execute one suite; returns (report, exit_code)."""
    sampler = Sampler(cfg.seed)

    if cfg.suite == "search":
        if cfg.order is None:
            raise UsageError("search needs --order")
        start = time.perf_counter()
        found = search_gyrogroups(cfg.order, max_results=cfg.max_results)
        ok = True
        for t in found:
            rep = validate_table(t)
            ok = ok and rep.passed
        report = VerificationReport(suite="search", model=f"order{cfg.order}", tolerances={})
        report.checks.append(
            CheckResult("all_candidates_valid", ok, float(not ok), len(found))
        )
        report.notes["count"] = len(found)
        report.notes["tables"] = [t.to_dict() for t in found]
        report.wall_time_s = time.perf_counter() - start
        return report, 0 if report.passed else 1

    if cfg.suite == "table-validate":
        report = validate_table(_require_table(cfg))
        return report, 0 if report.passed else 1

    if cfg.suite == "subgyrogroups":
        t = _require_table(cfg)
        start = time.perf_counter()
        subs = enumerate_subgyrogroups(t)
        report = VerificationReport(suite="subgyrogroups", model=t.name, tolerances={})
        report.checks.append(CheckResult("enumeration", True, 0.0, "exhaustive"))
        report.notes["count"] = len(subs)
        report.notes["subgyrogroups"] = [
            {
                "elements": [t.labels[i] for i in s.elements],
                "indices": list(s.elements),
                "invariant_under_all_gyrations": s.is_L_subgyrogroup,
            }
            for s in subs
        ]
        report.wall_time_s = time.perf_counter() - start
        return report, 0

    if cfg.suite == "cosets":
        t = _require_table(cfg)
        if cfg.subgyrogroup is None:
            raise UsageError("cosets needs --subgyrogroup")
        start = time.perf_counter()
        report = VerificationReport(suite="cosets", model=t.name, tolerances={})
        H = sorted(set(cfg.subgyrogroup))
        try:
            is_l = is_L_subgyrogroup(t, H)
        except AxiomViolationError as exc:
            report.checks.append(
                CheckResult("is_subgyrogroup", False, 1.0, "exhaustive",
                            witness={"error": str(exc)})
            )
            report.wall_time_s = time.perf_counter() - start
            return report, 1
        report.checks.append(CheckResult("is_subgyrogroup", True, 0.0, "exhaustive"))
        report.checks.append(
            CheckResult("invariant_under_all_gyrations", is_l, float(not is_l), "exhaustive")
        )
        if not is_l:
            report.wall_time_s = time.perf_counter() - start
            return report, 1
        blocks, pi = coset_partition(t, H)
        sizes = sorted({len(b) for b in blocks})
        report.checks.append(
            CheckResult("equal_block_sizes", sizes == [len(H)], 0.0, "exhaustive")
        )
        covered = sorted(i for b in blocks for i in b)
        report.checks.append(
            CheckResult(
                "disjoint_cover", covered == list(range(t.order)), 0.0, "exhaustive"
            )
        )
        report.notes["blocks"] = [[t.labels[i] for i in b] for b in blocks]
        report.notes["projection"] = pi.tolist()
        report.wall_time_s = time.perf_counter() - start
        return report, 0 if report.passed else 1

    # model-based suites
    try:
        model = _resolve_model(cfg.model)
    except AxiomViolationError as exc:
        return _structure_failure(cfg.suite, cfg.model, exc), 1

    if cfg.suite == "axioms":
        report = check_axioms(model, sampler, cfg.samples, cfg.tol)
        return report, 0 if report.passed else 1
    if cfg.suite == "identities":
        report = check_identities(model, sampler, cfg.samples, cfg.tol)
        return report, 0 if report.passed else 1
    if cfg.suite == "strong-base":
        report = check_strong_base(model, sampler=sampler, n_samples=cfg.samples, tol=cfg.tol)
        return report, 0 if report.passed else 1

    if cfg.suite == "admissible":
        chain = _build_chain(cfg, model)
        report = validate_admissible_chain(chain, sampler, cfg.samples, cfg.tol)
        return report, 0 if report.passed else 1

    if cfg.suite in ("prenorm", "metric"):
        chain = _build_chain(cfg, model)
        try:
            family = build_dyadic(chain)
        except ChainConditionError as exc:
            report = VerificationReport(
                suite=cfg.suite,
                model=model.name,
                seed=cfg.seed,
                tolerances=cfg.tol.to_dict(),
                notes={"chain": chain.describe()},
            )
            report.checks.append(
                CheckResult(
                    "halving_condition",
                    False,
                    1.0,
                    chain.depth,
                    witness={"error": str(exc), "level": exc.level},
                )
            )
            return report, 1
        if cfg.suite == "prenorm":
            report = check_prenorm_properties(family, sampler, cfg.samples, cfg.tol)
            return report, 0 if report.passed else 1
        prenorm = make_prenorm(family)
        sub = list(getattr(family.chain, "H", [])) or None
        space = QuotientMetricSpace(model, prenorm, sub)
        report = check_metric_properties(space, sampler, cfg.samples, cfg.tol)
        return report, 0 if report.passed else 1

    raise UsageError(f"unknown suite {cfg.suite!r}")


def _human_lines(report: VerificationReport, stream):
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        kind = c.samples if isinstance(c.samples, str) else f"{c.samples} samples"
        print(
            f"[{status}] {c.name:32s} max_residual {c.max_residual:.3e}  ({kind})",
            file=stream,
        )
    n_ok = sum(1 for c in report.checks if c.passed)
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"{verdict}: suite {report.suite} on {report.model}: "
        f"{n_ok}/{len(report.checks)} checks passed ({report.wall_time_s:.2f} s)",
        file=stream,
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gyro",
        description="Verification suites for gyrogroup models, finite tables "
        "and the dyadic prenorm construction.",
    )
    p.add_argument("suite", nargs="?", choices=sorted(SUITES), help="suite to run")
    p.add_argument("--model", default="mobius",
                   help="mobius | einstein | table:<name-or-path> | product:<a>+<b>")
    p.add_argument("--samples", type=int, default=10000, help="sample count (default 10000)")
    p.add_argument("--seed", type=int, default=42, help="root seed (default 42)")
    p.add_argument("--tol", type=float, default=None,
                   help="override both absolute and relative tolerance")
    p.add_argument("--chain", default=None,
                   help='chain spec JSON, e.g. {"kind":"radial_rapidity","ratio":0.25}')
    p.add_argument("--subgyrogroup", default=None,
                   help="comma-separated element indices, e.g. 0,2")
    p.add_argument("--depth", type=int, default=None, help="chain depth (default 24)")
    p.add_argument("--order", type=int, default=None, help="table order for search")
    p.add_argument("--max-results", type=int, default=None, help="cap search results")
    p.add_argument("--out", default=None, help="write the JSON report to this path")
    p.add_argument("--list-suites", action="store_true", help="list suites and exit")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.list_suites:
        for name in sorted(SUITES):
            print(f"{name:16s} {SUITES[name]}")
        return 0
    if args.suite is None:
        parser.print_usage(sys.stderr)
        print("gyro: a suite name is required (see --list-suites)", file=sys.stderr)
        return 2

    try:
        tol = ToleranceConfig() if args.tol is None else ToleranceConfig(
            abs_tol=args.tol, rel_tol=args.tol
        )
        cfg = RunConfig(
            suite=args.suite,
            model=args.model,
            samples=args.samples,
            seed=args.seed,
            tol=tol,
            chain=None if args.chain is None else parse_chain_spec(args.chain),
            subgyrogroup=(
                None if args.subgyrogroup is None else _parse_subgyrogroup(args.subgyrogroup)
            ),
            depth=args.depth,
            order=args.order,
            max_results=args.max_results,
        )
        report, code = run_suite(cfg)
    except UsageError as exc:
        print(f"gyro: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"gyro: {exc}", file=sys.stderr)
        return 2
    except TableFormatError as exc:
        print(f"gyro: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"gyro: {exc}", file=sys.stderr)
        return 3

    _human_lines(report, sys.stderr)
    payload = canonical_json(report.to_dict()) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"gyro: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(payload)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
