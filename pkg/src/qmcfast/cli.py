"""Command-line front end: ``qmcfast {gen,transform,kernel,integrate,study}``.

Every run prints its fully resolved configuration as one JSON line on
stderr (prefixed ``# config:``).  Passing that JSON back through
``--config FILE`` reproduces the run.

Exit codes: 0 success, 1 tolerance not met, 2 usage or input error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .batch import PointBatch
from .dnet import RANDOMIZATIONS, DigitalNet, PrecisionError
from .expr import expression_integrand
from .fastgram import SingularGramError, discrepancy, gram_build, gram_matvec, gram_solve, optimal_weights
from .halton import HALTON_RANDOMIZATIONS, Halton
from .integrands import CATALOG, integrand_library
from .kernels import KernelSpec
from .lattice import Lattice
from .lddata_io import batch_csv_text, read_dnet_matrices, read_lattice_vector, read_point_batch, write_point_batch
from .rng import default_seed
from .rqmc import SAMPLER_PRESETS, IIDSampler, rqmc_adaptive, rqmc_fixed
from .study import StudyConfig, run_study
from .transforms import fftbr, fwht, ifftbr

__all__ = ["main", "build_parser", "UsageError"]

EXIT_OK, EXIT_TOL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    """Invalid or conflicting options."""


# ---------------------------------------------------------------------------
# vector text files


def _fmt(v) -> str:
    if isinstance(v, complex) or np.iscomplexobj(v):
        v = complex(v)
        return f"{v.real!r}{v.imag:+}j" if v.imag != 0 else repr(v.real)
    return repr(float(v))


def read_vectors(path) -> np.ndarray:
    """Whitespace- or comma-separated table; columns are vectors.  Returns ``(n, cols)``."""
    rows = []
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        s = line.split("#", 1)[0].replace(",", " ").split()
        if not s:
            continue
        try:
            rows.append([complex(t) if "j" in t else float(t) for t in s])
        except ValueError:
            raise UsageError(f"{path}:{no}: cannot parse {line!r}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise UsageError(f"{path}: expected a nonempty rectangular table")
    return np.array(rows)


def vectors_text(a: np.ndarray) -> str:
    a = np.atleast_2d(a.T).T if a.ndim == 1 else a
    return "".join(" ".join(_fmt(v) for v in row) + "\n" for row in a)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _generator(a):
    rand = a.rand
    if a.type == "lattice":
        if a.alpha != 1:
            raise UsageError("interlacing (--alpha) applies to digital nets only")
        g = read_lattice_vector(a.source) if a.source else None
        rand = rand or "shift"
        if rand not in ("shift", "none"):
            raise UsageError(f"lattice randomization must be shift or none, got {rand}")
        return Lattice(a.d, a.R, a.seed, g, rand, a.order, threads=a.threads), rand
    if a.type == "dnet":
        C = read_dnet_matrices(a.source) if a.source else None
        rand = rand or "lms-shift"
        if rand not in RANDOMIZATIONS:
            raise UsageError(f"dnet randomization must be one of {RANDOMIZATIONS}")
        return DigitalNet(a.d, a.R, a.seed, rand, a.alpha, C, a.order, a.lms_family, threads=a.threads), rand
    if a.type == "halton":
        if a.alpha != 1:
            raise UsageError("digital interlacing is not available for Halton points (bases differ)")
        if a.order != "radical-inverse":
            raise UsageError("Halton points are generated in radical-inverse order only")
        rand = rand or "none"
        if rand not in HALTON_RANDOMIZATIONS:
            raise UsageError(f"halton randomization must be one of {HALTON_RANDOMIZATIONS}")
        return Halton(a.d, a.R, a.seed, rand, a.lms_family, threads=a.threads), rand
    if a.alpha != 1 or (rand not in (None, "none")):
        raise UsageError("iid points take no randomization or interlacing options")
    return IIDSampler(a.d, a.R, a.seed, a.threads), "none"


def cmd_gen(a) -> int:
    gen, rand = _generator(a)
    x = gen.points(a.start, a.start + a.n)
    batch = PointBatch(x, a.type, a.order, rand, a.seed, a.start)
    if a.out is None:
        if a.format != "csv":
            raise UsageError("binary output needs --out")
        sys.stdout.write(batch_csv_text(batch))
        return EXIT_OK
    write_point_batch(batch, a.out, a.format)
    meta = {"version": __version__, "config": _resolved(a), "shape": list(x.shape), "format": a.format}
    Path(str(a.out) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_transform(a) -> int:
    y = read_vectors(a.input)
    n = y.shape[0]
    if n & (n - 1):
        raise UsageError(f"vector length must be a power of 2, got {n}")
    fn = {"fftbr": fftbr, "ifftbr": ifftbr, "fwht": fwht}[a.kind]
    _emit(vectors_text(fn(y.T).T), a.out)
    return EXIT_OK


def _kernel_spec(a, d: int) -> KernelSpec:
    alphas = a.alpha_k if len(a.alpha_k) == d else a.alpha_k * d if len(a.alpha_k) == 1 else None
    etas = a.eta if len(a.eta) == d else a.eta * d if len(a.eta) == 1 else None
    if alphas is None or etas is None:
        raise UsageError(f"--alpha-k and --eta need 1 or d={d} values")
    return KernelSpec(a.family, tuple(alphas), a.gamma, tuple(etas))


def cmd_kernel(a) -> int:
    seq = {"si-bernoulli": "lattice", "dsi-walsh": "dnet"}[a.family]
    if a.points:
        x = read_point_batch(a.points)
        batch = PointBatch(x[:1], seq)
    else:
        if a.d is None or a.m is None:
            raise UsageError("give --points FILE or --d and --m to generate points")
        if seq == "lattice":
            gen = Lattice(a.d, 1, a.seed, randomize="shift")
        else:
            gen = DigitalNet(a.d, 1, a.seed, randomize=a.rand or "lms-shift")
        batch = gen.gen(2**a.m)
    G = gram_build(_kernel_spec(a, batch.d), batch)
    if a.op == "eigenvalues":
        _emit(vectors_text(G.eigenvalues), a.out)
    elif a.op in ("matvec", "solve"):
        if not a.y:
            raise UsageError(f"--op {a.op} needs --y FILE")
        y = read_vectors(a.y).T
        fn = gram_matvec if a.op == "matvec" else gram_solve
        _emit(vectors_text(fn(G, y).T), a.out)
    elif a.op == "weights":
        _emit(vectors_text(optimal_weights(G)), a.out)
    else:
        w = read_vectors(a.y)[:, 0].real if a.y else np.full(G.n, 1.0 / G.n)
        _emit(f"{discrepancy(G, w)!r}\n", a.out)
    return EXIT_OK


def _integrand(a):
    if a.expr:
        return expression_integrand(a.expr, a.d, a.mean)
    if a.f is None:
        raise UsageError("give --f NAME or --expr EXPRESSION")
    return integrand_library(a.f, a.d)


def cmd_integrate(a) -> int:
    f = _integrand(a)
    if a.tol is None:
        if a.n is None:
            raise UsageError("fixed mode needs --n (or give --tol for adaptive mode)")
        res = rqmc_fixed(f, a.sampler, a.n, a.R, a.tau, a.seed, a.threads)
    else:
        res = rqmc_adaptive(f, a.sampler, a.tau, a.tol, a.n0, a.n_max, a.R, a.seed, a.threads)
    if not np.isfinite(res.mu_hat):
        print(f"numeric failure: estimate is {res.mu_hat}", file=sys.stderr)
        return EXIT_NUMERIC
    rec = {"integrand": f.name, "sampler": a.sampler, **res.to_dict(), "seed": a.seed}
    print(f"mu_hat={res.mu_hat!r} ci=[{res.ci[0]!r}, {res.ci[1]!r}] n={res.n} R={res.R} "
          f"tol_met={res.tol_met}")
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=list(rec))
            wr.writeheader()
            wr.writerow(rec)
    return EXIT_OK if res.tol_met else EXIT_TOL


def cmd_study(a) -> int:
    for name in a.integrands:
        if name not in CATALOG:
            raise UsageError(f"unknown integrand {name!r}; choose from {CATALOG}")
    for s in a.samplers:
        if s not in SAMPLER_PRESETS:
            raise UsageError(f"unknown sampler {s!r}; choose from {sorted(SAMPLER_PRESETS)}")
    cfg = StudyConfig(tuple(a.integrands), tuple(a.samplers), a.m_min, a.m_max, a.randomizations, a.seed, a.threads)
    rows, slopes = run_study(cfg)
    text = "integrand,sampler,n,rmse\n" + "".join(
        f"{r['integrand']},{r['sampler']},{r['n']},{r['rmse']!r}\n" for r in rows)
    _emit(text, a.out)
    for (name, s), v in slopes.items():
        print(f"slope {name} {s} {v:.3f}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and config echo


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $QMC_SEED or 7)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for replications")
    common.add_argument("--config", default=None, help="JSON config echo to replay")

    p = argparse.ArgumentParser(prog="qmcfast", description="Randomized low-discrepancy sequences and fast kernel algebra.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a randomized point batch")
    g.add_argument("--type", choices=("lattice", "dnet", "halton", "iid"), default="dnet")
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--n", type=int, default=2**10)
    g.add_argument("--R", type=int, default=1)
    g.add_argument("--start", type=int, default=0)
    g.add_argument("--order", choices=("radical-inverse", "linear", "gray"), default="radical-inverse")
    g.add_argument("--rand", default=None, help="randomization (type-specific default)")
    g.add_argument("--alpha", type=int, default=1, help="digital interlacing order (dnet only)")
    g.add_argument("--lms-family", dest="lms_family", choices=("matousek", "tezuka", "owen-striped"), default="matousek")
    g.add_argument("--source", default=None, help="generating vector or matrix file")
    g.add_argument("--out", default=None)
    g.add_argument("--format", choices=("csv", "binary"), default="csv")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("transform", parents=[common], help="apply fftbr, ifftbr or fwht to columns of a file")
    t.add_argument("--kind", choices=("fftbr", "ifftbr", "fwht"), required=True)
    t.add_argument("--input", required=True)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_transform)

    k = sub.add_parser("kernel", parents=[common], help="fast Gram algebra on lattice or net points")
    k.add_argument("--op", choices=("eigenvalues", "matvec", "solve", "discrepancy", "weights"), default="eigenvalues")
    k.add_argument("--family", choices=("si-bernoulli", "dsi-walsh"), default="dsi-walsh")
    k.add_argument("--alpha-k", dest="alpha_k", type=int, nargs="+", default=[2])
    k.add_argument("--gamma", type=float, default=1.0)
    k.add_argument("--eta", type=float, nargs="+", default=[1.0])
    k.add_argument("--points", default=None, help="point batch file (first replication is used)")
    k.add_argument("--d", type=int, default=None)
    k.add_argument("--m", type=int, default=None)
    k.add_argument("--rand", default=None)
    k.add_argument("--y", default=None, help="vector file for matvec/solve/discrepancy weights")
    k.add_argument("--out", default=None)
    k.set_defaults(func=cmd_kernel)

    i = sub.add_parser("integrate", parents=[common], help="RQMC estimate with a t confidence interval")
    i.add_argument("--f", default=None, help=f"catalog integrand: {', '.join(CATALOG)}")
    i.add_argument("--expr", default=None, help="integrand expression in x1..xd")
    i.add_argument("--mean", type=float, default=None, help="exact mean of --expr, if known")
    i.add_argument("--d", type=int, default=None)
    i.add_argument("--sampler", choices=sorted(SAMPLER_PRESETS), default="dnet-lms")
    i.add_argument("--n", type=int, default=None, help="fixed number of points")
    i.add_argument("--tol", type=float, default=None, help="absolute tolerance (adaptive mode)")
    i.add_argument("--R", type=int, default=15)
    i.add_argument("--tau", type=float, default=0.05)
    i.add_argument("--n0", type=int, default=2**8)
    i.add_argument("--n-max", dest="n_max", type=int, default=2**20)
    i.add_argument("--csv", default=None)
    i.set_defaults(func=cmd_integrate)

    s = sub.add_parser("study", parents=[common], help="RMSE convergence study")
    s.add_argument("--integrands", nargs="+", default=["simple-d1", "simple-d2"])
    s.add_argument("--samplers", nargs="+", default=["iid", "lattice", "dnet-lms", "dnet-ho"])
    s.add_argument("--m-min", dest="m_min", type=int, default=4)
    s.add_argument("--m-max", dest="m_max", type=int, default=12)
    s.add_argument("--randomizations", type=int, default=100)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_study)
    return p


def _resolved(a) -> dict:
    return {k: v for k, v in vars(a).items() if k not in ("func", "config")}


def _argv_from_config(cfg: dict) -> list[str]:
    argv = [cfg["command"]]
    for key, val in cfg.items():
        if key == "command" or val is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(val, list):
            argv += [flag, *map(str, val)]
        else:
            argv += [flag, str(val)]
    return argv


def _load_config(path: str) -> dict:
    text = Path(path).read_text().strip()
    if text.startswith("# config:"):
        text = text[len("# config:"):]
    cfg = json.loads(text)
    if not isinstance(cfg, dict) or "command" not in cfg:
        raise UsageError(f"{path}: config must be a JSON object with a 'command' key")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        if len(argv) == 2 and argv[0] == "--config":
            argv = _argv_from_config(_load_config(argv[1]))
        args = parser.parse_args(argv)
        if args.config:
            args = parser.parse_args(_argv_from_config(_load_config(args.config)))
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.seed is None:
        args.seed = default_seed()
    print("# config: " + json.dumps(_resolved(args), sort_keys=True), file=sys.stderr)
    try:
        with np.errstate(divide="raise", invalid="raise"):
            return args.func(args)
    except (SingularGramError, PrecisionError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
