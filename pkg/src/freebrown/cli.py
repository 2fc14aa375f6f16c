"""Command-line entry point: ``freebrown <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.  Files written
by ``compress``, ``stable`` and ``rmt`` carry the parsed run configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import FreeBrownError, NumericalFailure, ValidationError
from .measures import PositiveRealMeasure, RadialBrownMeasure, moment
from .semigroup import CompressionParams, brown_from_s, compressed_brown, disk_convergence_gap
from .stable import StableParams, mu_beta_abs_moment, nu_beta_moment, stable_table

TRANSFORMS = ("cauchy", "psi", "chi", "s", "r", "s-from-r")
RMT_KINDS = ("truncated-haar", "ginibre", "product", "free-sum", "moments")
ANCHORS = np.arange(1, 20) / 20  # t = 0.05, 0.10, ..., 0.95 always present in quantile CSVs


@dataclass
class RunConfig:
    command: str
    flags: dict
    output_path: Optional[str] = None
    seed: Optional[int] = None
    grid_size: int = 512
    tolerances: dict = field(default_factory=lambda: {"root": 1e-12, "identity": 1e-8})
    version: str = __version__

    def to_json(self) -> dict:
        return asdict(self)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _csv_floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from exc


def _seed(value: Optional[int]) -> int:
    if value is None:
        env = os.environ.get("FREEBROWN_SEED")
        if env is None:
            raise ValidationError("no --seed given and FREEBROWN_SEED is unset")
        try:
            value = int(env)
        except ValueError as exc:
            raise ValidationError("FREEBROWN_SEED must be an integer") from exc
    if not 0 <= value < 2**64:
        raise ValidationError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="freebrown", description="Brown measures of R-diagonal elements under free compression.")
    p.add_argument("--version", action="version", version=f"freebrown {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("transform", help="evaluate G, psi, chi, S or R of a measure")
    t.add_argument("--measure", required=True)
    t.add_argument("--which", required=True, choices=TRANSFORMS)
    t.add_argument("--at", required=True, type=float, action="append")

    c = sub.add_parser("compress", help="Brown quantile of a compressed R-diagonal element")
    c.add_argument("--measure", required=True)
    c.add_argument("--s", required=True, type=float)
    c.add_argument("--scaling", default="sqrt-s", choices=("none", "sqrt-s", "s"))
    c.add_argument("--grid", type=int, default=512)
    c.add_argument("--out", required=True)

    st = sub.add_parser("stable", help="quantile and moments of mu_beta")
    st.add_argument("--beta", required=True, type=float)
    st.add_argument("--c", type=float, default=1.0)
    st.add_argument("--grid", type=int, default=512)
    st.add_argument("--moments", type=_csv_floats, default=[])
    st.add_argument("--nu-moments", type=_csv_floats, default=[])
    st.add_argument("--out", required=True)

    r = sub.add_parser("rmt", help="random-matrix Monte Carlo check")
    r.add_argument("kind", choices=RMT_KINDS)
    r.add_argument("--n", required=True, type=int)
    g = r.add_mutually_exclusive_group()
    g.add_argument("--s", type=float)
    g.add_argument("--k", type=int)
    r.add_argument("--gamma", type=float, default=0.25, help="moment order for 'moments'")
    r.add_argument("--trials", required=True, type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--parallel", type=int, default=1)
    r.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="run the identity suites")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    return p


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _quantile_rows(b: RadialBrownMeasure) -> str:
    anchors = ANCHORS[(ANCHORS > b.atom0) & (ANCHORS < 1)]
    t = np.union1d(b.t_grid, anchors)
    q = np.maximum.accumulate(np.asarray(b.quantile(t), dtype=float))
    return "t,r\n" + "".join(f"{a:.12g},{v:.12g}\n" for a, v in zip(t, q))


def _sidecar(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix != ".json" else out.with_name(out.stem + ".meta.json")


def _cmd_transform(a, cfg):
    from . import transforms as tr

    mu = PositiveRealMeasure.load(a.measure)
    at = np.asarray(a.at, dtype=float)
    fn = {
        "cauchy": lambda v: np.real(tr.cauchy(mu, v)),
        "psi": lambda v: tr.psi(mu, v),
        "chi": lambda v: tr.chi(mu, v),
        "s": lambda v: tr.s_transform(mu, v),
        "r": lambda v: tr.r_transform(mu, v),
        "s-from-r": lambda v: tr.s_from_r(mu, v),
    }[a.which]
    values = np.atleast_1d(fn(at))
    sys.stdout.write("w,value\n" + "".join(f"{w:.12g},{v:.12g}\n" for w, v in zip(at, values)))


def _cmd_compress(a, cfg):
    mu = PositiveRealMeasure.load(a.measure)
    if mu.is_delta_zero():
        raise ValidationError("h^2 = delta_0 has no S-transform")
    p = CompressionParams(a.s, a.scaling.replace("-", "_"))
    b = compressed_brown(mu, p, a.grid)
    out = Path(a.out)
    out.write_text(_quantile_rows(b))
    m1 = moment(mu, 1.0)
    gap = None
    if not m1.unbounded and abs(m1.value - 1) <= 1e-6:
        gap = disk_convergence_gap(mu, a.s, a.grid)
    _write_json(
        _sidecar(out),
        {
            "delta_s": b.atom0,
            "r_min": b.r_min,
            "r_max": b.r_max if math.isfinite(b.r_max) else "inf",
            "gap_to_disk": gap,
            "config": cfg.to_json(),
        },
    )


def _cmd_stable(a, cfg):
    params = StableParams(a.beta, a.c)
    b = brown_from_s(stable_table(params), 0.0, a.grid)
    out = Path(a.out)
    out.write_text(_quantile_rows(b))
    payload = {
        "beta": a.beta,
        "c": a.c,
        "abs_moments": {f"{k:g}": mu_beta_abs_moment(a.beta, k).to_json() for k in a.moments},
        "config": cfg.to_json(),
    }
    if a.nu_moments:
        if not a.beta > 0:
            raise ValidationError("--nu-moments needs beta > 0")
        payload["nu_moments"] = {f"{g:g}": nu_beta_moment(a.beta, g).to_json() for g in a.nu_moments}
    else:
        payload["nu_moments"] = {}
    _write_json(_sidecar(out), payload)


def _cmd_rmt(a, cfg):
    from . import rmt

    seed = cfg.seed
    if a.trials < 1 or a.n < 1 or a.parallel < 1:
        raise ValidationError("--n, --trials and --parallel must be >= 1")
    if a.kind == "moments":
        k = 1 if a.k is None else a.k
        res = rmt.singular_moment_check(k, a.gamma, a.n, a.trials, seed, a.parallel)
        payload = {**asdict(res), "k": k, "gamma": a.gamma}
    else:
        if a.kind == "truncated-haar":
            s = 2.0 if a.s is None else a.s
            h2 = PositiveRealMeasure.from_atoms([(1.0, 1.0)])
            pred = compressed_brown(h2, CompressionParams(s, "sqrt_s"), cfg.grid_size)
            spec = rmt.EnsembleSpec("truncated_haar", a.n, a.trials, seed, s=s)
            rep = rmt.run_experiment(spec, pred, math.sqrt(s), a.parallel, f"haar_compressed_s={s:g}")
        elif a.kind == "ginibre":
            spec = rmt.EnsembleSpec("ginibre", a.n, a.trials, seed)
            rep = rmt.run_experiment(spec, rmt.stable_brown(0), 1.0, a.parallel, "mu_0")
        elif a.kind == "product":
            k = 1 if a.k is None else a.k
            spec = rmt.EnsembleSpec("ginibre_product", a.n, a.trials, seed, k=k)
            rep = rmt.run_experiment(spec, rmt.stable_brown(k), 1.0, a.parallel, f"mu_{k}")
        else:
            rep = rmt.free_sum_check(1 if a.k is None else a.k, a.n, a.trials, seed, a.parallel)
        payload = rep.to_json()
    payload["config"] = cfg.to_json()
    _write_json(Path(a.out), payload)


def _cmd_verify(a, cfg):
    from .verify import format_table, run_suites

    results = run_suites(cases=20 if a.quick else 100, seed=a.seed)
    print(format_table(results))
    if not all(r.passed for r in results):
        raise NumericalFailure("identity suite failure")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as done:  # --help / --version
            return int(done.code or 0)
        seed = _seed(args.seed) if args.command == "rmt" else getattr(args, "seed", None)
        flags = {k: v for k, v in vars(args).items() if k != "command"}
        cfg = RunConfig(
            args.command,
            flags,
            getattr(args, "out", None),
            seed,
            getattr(args, "grid", None) or 512,
        )
        {
            "transform": _cmd_transform,
            "compress": _cmd_compress,
            "stable": _cmd_stable,
            "rmt": _cmd_rmt,
            "verify": _cmd_verify,
        }[args.command](args, cfg)
    except ValidationError as exc:
        print(f"freebrown: error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"freebrown: numerical failure: {exc}", file=sys.stderr)
        return 3
    except FreeBrownError as exc:
        print(f"freebrown: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"freebrown: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
