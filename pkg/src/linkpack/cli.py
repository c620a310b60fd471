"""Command-line entry point.

Every subcommand prints sorted-key JSON (or writes it with ``--out``).
Exit status: 0 success, 2 constraint violations found, 1 usage or internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import data_path

DEFAULT_SEED = 20240101
DEMO_PACKING_EPSILON = 0.05
EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    epsilon: float | None = None
    seed: int = DEFAULT_SEED
    input: str | None = None
    out: str | None = None
    a: float | None = None
    k: int | None = None
    p: int | None = None
    format: str = "json"


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}")


def _indices(text: str) -> list[int]:
    if "," in text:
        return [int(t) for t in text.split(",")]
    if not text.isdigit():
        raise UsageError(f"bad index list {text!r}")
    return [int(c) for c in text]


# ---------------------------------------------------------------------------

def cmd_pack(args) -> int:
    from .packing import multigeneration, save_packing

    packing = multigeneration(args.epsilon, args.generations)
    if args.out:
        save_packing(packing, args.out)
    _emit({"epsilon": packing.epsilon, "counts": packing.counts, "total_count": packing.total_count,
           "out": args.out}, None)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .packing import load_packing, verify_packing

    rep = verify_packing(load_packing(args.input), args.epsilon)
    summary = rep.summary()
    summary.pop("seconds")          # keep output reproducible
    _emit(summary, args.out)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_certify(args) -> int:
    from .certify import CertificateError, certificate
    from .geometry import canonical_hopf, load_link
    from .grid import ConstraintViolation

    if args.input:
        link = load_link(args.input)
    elif args.epsilon is not None:
        link = canonical_hopf(args.epsilon)
    else:
        link = load_link(data_path("hopf.json"))
    try:
        cert = certificate(link, args.red, args.blue, args.epsilon)
    except CertificateError as exc:
        if isinstance(exc.cause, ConstraintViolation):
            _emit({"error": str(exc), "stage": exc.stage}, args.out)
            return EXIT_VIOLATION
        raise
    _emit(cert.to_json(), args.out)
    return EXIT_OK


def cmd_mu(args) -> int:
    from .diagrams import load_pd, mu_bar

    path = Path(args.pd)
    if not path.exists():
        path = data_path(args.pd)
    res = mu_bar(load_pd(path), _indices(args.indices), args.mod, args.depth)
    _emit(res.to_json(), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    from .burnside import thm_bounds

    rep = thm_bounds(args.theorem, args.epsilon, args.a, args.k, args.p)
    _emit(rep.to_json(), args.out)
    return EXIT_OK


def cmd_burnside(args) -> int:
    from .burnside import burnside_order, burnside_order_exponent

    _emit({"m": args.m, "exponent_of_3": burnside_order_exponent(args.m),
           "order": str(burnside_order(args.m))}, args.out)
    return EXIT_OK


def cmd_density(args) -> int:
    from .packing import density_fit, multigeneration, verify_packing

    eps = _floats(args.epsilons)
    rows, gen0 = [], []
    for e in eps:
        packing = multigeneration(e, args.generations)
        gen0.append(packing.generations[0].count)
        rep = verify_packing(packing)
        per_gen = {}
        for g, _, d in rep.distances:
            per_gen[g] = min(per_gen.get(g, d), d)
        for g in packing.generations:
            rows.append({"epsilon": e, "generation": g.index, "count": g.count,
                         "min_pair_distance": round(per_gen[g.index], 12)})
    fit = density_fit(eps, gen0)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["epsilon", "generation", "count", "min_pair_distance"])
            w.writeheader()
            w.writerows(rows)
    _emit({"fit": fit.to_json(), "rows": rows}, args.out)
    return EXIT_OK


def cmd_demo(args) -> int:
    """Small end-to-end run over every module."""
    from .burnside import burnside_order, smallest_valid_prime
    from .certify import certificate, dc_count_bound, linking_integer
    from .diagrams import load_pd, mu_bar
    from .geometry import canonical_hopf, split_pair
    from .packing import multigeneration, verify_packing

    eps = 0.1 if args.epsilon is None else args.epsilon
    hopf = canonical_hopf(eps)
    borr = mu_bar(load_pd(data_path("borromean.pd")), (1, 2, 3))
    packing = multigeneration(DEMO_PACKING_EPSILON, 3)
    _emit({
        "epsilon": eps,
        "hopf_linking": linking_integer(hopf.component("r"), hopf.component("b")),
        "hopf_eq1": certificate(hopf).eq1,
        "split_eq1": certificate(split_pair(eps)).eq1,
        "dc_count_log": dc_count_bound(eps).log_value,
        "borromean_mu123": borr.coefficient,
        "borromean_valid_prime": smallest_valid_prime([borr.coefficient]),
        "burnside_order_2": burnside_order(2),
        "packing_counts": packing.counts,
        "packing_verified": verify_packing(packing).passed,
    }, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="linkpack", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pack", help="build a multi-generation Hopf packing")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--generations", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_pack)

    p = sub.add_parser("verify", help="verify a packing JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("certify", help="decorated-colouring certificate of a two-component link")
    p.add_argument("--input", help="link JSON (default: bundled hopf.json)")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--red", default="r")
    p.add_argument("--blue", default="b")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("mu", help="non-repeating mu-bar invariant of a PD code")
    p.add_argument("--pd", required=True, help="PD file or bundled name such as borromean.pd")
    p.add_argument("--indices", required=True, help="e.g. 123 or 1,2,3")
    p.add_argument("--mod", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_mu)

    p = sub.add_parser("bounds", help="packing-number upper bounds")
    p.add_argument("--theorem", type=int, choices=(1, 2, 4), required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("burnside", help="order of the free Burnside group of exponent 3")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_burnside)

    p = sub.add_parser("density", help="packing counts and log-log density fit")
    p.add_argument("--epsilons", default="0.05,0.025,0.0125")
    p.add_argument("--generations", type=int, default=8)
    p.add_argument("--csv")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("demo", help="small end-to-end run")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_demo)
    return ap


def config_from_args(args) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    vals = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    return RunConfig(**vals)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"linkpack: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:       # --help
        return int(exc.code or 0)
    args.config = config_from_args(args)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"linkpack: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:
        print(f"linkpack: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
