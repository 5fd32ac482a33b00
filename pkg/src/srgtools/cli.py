"""Command-line front end.

    srgtools plot "M mu=1 |resolvent 1" --out res.svg
    srgtools rate --method pp --mu 1 --alpha 1
    srgtools tightness --method fs_mono_lip --alpha 0.4 --mu 1 --L 2
    srgtools sample --matrix "0,-1;1,0" --pairs 500
    srgtools iterate --method drs --worst-case --alpha 1 --mu 0.5 --beta 1
    srgtools verify

Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import analyzer as an
from . import checks
from . import classes as cl
from . import fixedpoint as fp
from . import region as rg
from . import sampler as sp


class UsageError(Exception):
    pass


# every option defaults to None so that config-file values can fill the gaps
DEFAULTS = {
    "seed": 0, "pairs": 1000, "grid": 200, "width": 480, "height": 480, "window": 3.0,
    "strategy": "gaussian", "spread": 1.0, "max_iters": 200, "theta": None,
    "lam": 1.0, "dim": 2, "draws": 0,
}
FLOAT_KEYS = {"alpha", "mu", "L", "beta", "gamma", "theta", "tol", "window", "spread", "lam", "rate"}
INT_KEYS = {"seed", "pairs", "grid", "width", "height", "max_iters", "dim", "draws"}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags given on the command line win")
    common.add_argument("--out", help="output path (default: stdout)")
    for name in ("alpha", "mu", "L", "beta", "gamma", "theta", "tol"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--pairs", type=int)
    common.add_argument("--grid", type=int)
    common.add_argument("--method")

    p = argparse.ArgumentParser(prog="srgtools", description="Scaled relative graph tools.")
    p.add_argument("--version", action="version", version=f"srgtools {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    q = sub.add_parser("plot", parents=[common], help="draw a class or region as SVG")
    q.add_argument("spec", help='class spec such as "M mu=1 |resolvent 1", or region text')
    q.add_argument("--width", type=int)
    q.add_argument("--height", type=int)
    q.add_argument("--window", type=float, help="half-width of the view for unbounded regions")
    q.add_argument("--cloud", help="SrgCloud CSV to overlay")

    sub.add_parser("rate", parents=[common], help="print the closed-form contraction factor")

    q = sub.add_parser("tightness", parents=[common], help="compare closed form with numeric supremum")
    q.add_argument("--draws", type=int, help="random draws from the valid domain instead of one point")

    q = sub.add_parser("sample", parents=[common], help="sample the SRG of a concrete operator")
    q.add_argument("--matrix", help='rows separated by ";", entries by ","')
    q.add_argument("--op", choices=["soft_threshold", "a_z"], help="named operator")
    q.add_argument("--z", help="complex point re,im for --op a_z")
    q.add_argument("--lam", type=float)
    q.add_argument("--dim", type=int)
    q.add_argument("--strategy", choices=["gaussian", "sphere"])
    q.add_argument("--spread", type=float)

    q = sub.add_parser("iterate", parents=[common], help="run a fixed-point iteration")
    q.add_argument("--matrix", help="operator (A for DRS)")
    q.add_argument("--matrix-b", dest="matrix_b", help="second operator B for DRS")
    q.add_argument("--worst-case", dest="worst_case", action="store_true",
                   help="DRS on the worst-case pair built from alpha, mu, beta")
    q.add_argument("--x0", help="comma-separated start point")
    q.add_argument("--max-iters", dest="max_iters", type=int)
    q.add_argument("--rate", type=float, help="predicted factor to verify against")

    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    return p


def _merge_config(args):
    if not getattr(args, "config", None):
        cfg = {}
    else:
        try:
            cfg = fp.parse_config(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}")
        except ValueError as exc:
            raise UsageError(f"{args.config}: {exc}")
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if getattr(args, key, None) is not None:
            continue
        try:
            if key in FLOAT_KEYS:
                value = float(value)
            elif key in INT_KEYS:
                value = int(value)
        except ValueError:
            raise UsageError(f"config key {key}: not a number: {value!r}")
        setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)
    return args


def _write(args, text: str):
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(args.out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}")


def _matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(v) for v in r.split(",")] for r in text.split(";")]
        m = np.array(rows, float)
    except ValueError:
        raise UsageError(f"bad matrix {text!r}")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UsageError("matrix must be square")
    return m


def _method_spec(args) -> an.MethodSpec:
    if not args.method:
        raise UsageError("--method is required")
    try:
        method = an.Method.parse(args.method)
        return an.MethodSpec(method, alpha=args.alpha, mu=args.mu, L=args.L, beta=args.beta,
                             gamma=args.gamma, theta=args.theta)
    except ValueError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def cmd_rate(args) -> int:
    spec = _method_spec(args)
    r = an.closed_form_rate(spec)
    lines = [f"method={spec.method.value}"]
    for k in ("alpha", "mu", "L", "beta", "gamma", "theta"):
        v = getattr(spec, k)
        if v is not None:
            lines.append(f"{k}={float(v)!r}")
    lines += [f"closed_form={r!r}", f"contractive={str(r < 1).lower()}"]
    _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_tightness(args) -> int:
    tol = args.tol if args.tol is not None else 2e-3
    if args.draws:
        if not args.method:
            raise UsageError("--method is required")
        try:
            reports = an.sweep(an.Method.parse(args.method), args.draws, args.seed, tol)
        except ValueError as exc:
            raise UsageError(str(exc))
    else:
        reports = [an.tightness_check(_method_spec(args), tol)]
    _write(args, an.reports_to_csv(reports))
    return 0 if all(r.tight for r in reports) else 1


def cmd_sample(args) -> int:
    if args.matrix:
        op = sp.DenseMatrix(_matrix(args.matrix))
    elif args.op == "soft_threshold":
        op = fp.soft_threshold(args.lam, args.dim)
    elif args.op == "a_z":
        if not args.z:
            raise UsageError("--op a_z needs --z re,im")
        try:
            re, im = (float(v) for v in args.z.split(","))
        except ValueError:
            raise UsageError(f"bad --z {args.z!r}")
        op = sp.a_z(complex(re, im))
    else:
        raise UsageError("sample needs --matrix or --op")
    cloud = sp.srg_points(op, args.pairs, strategy=args.strategy, seed=args.seed, spread=args.spread)
    _write(args, cloud.to_csv())
    return 0


def cmd_iterate(args) -> int:
    method = (args.method or "").upper()
    if method not in fp.IterMethod.__members__:
        raise UsageError(f"--method must be one of {list(fp.IterMethod.__members__)}")
    alpha = args.alpha if args.alpha is not None else 1.0
    theta = args.theta if args.theta is not None else 0.5
    if args.worst_case:
        if method != "DRS" or None in (args.mu, args.beta):
            raise UsageError("--worst-case needs --method drs with --mu and --beta")
        try:
            ops = list(fp.worst_case_drs(alpha, args.mu, args.beta))
        except ValueError as exc:
            raise UsageError(str(exc))
    else:
        if not args.matrix:
            raise UsageError("iterate needs --matrix (and --matrix-b for DRS) or --worst-case")
        ops = [sp.DenseMatrix(_matrix(args.matrix))]
        if method == "DRS":
            if not args.matrix_b:
                raise UsageError("DRS needs --matrix-b")
            ops.append(sp.DenseMatrix(_matrix(args.matrix_b)))
    n = ops[0].dim
    if args.x0:
        try:
            x0 = np.array([float(v) for v in args.x0.split(",")])
        except ValueError:
            raise UsageError(f"bad --x0 {args.x0!r}")
        if x0.size != n:
            raise UsageError(f"--x0 needs {n} entries")
    else:
        x0 = np.ones(n)
    stop = args.tol if args.tol is not None else 1e-12
    try:
        spec = fp.IterationSpec(method, ops, x0, alpha=alpha, theta=theta,
                                max_iters=args.max_iters, stop_tol=stop)
    except ValueError as exc:
        raise UsageError(str(exc))
    traj = fp.run(spec)
    _write(args, traj.to_csv())
    if args.rate is not None:
        try:
            ok = fp.rate_verify(traj, args.rate)
        except ValueError as exc:
            raise UsageError(str(exc))
        print(f"rate_verify={str(ok).lower()}", file=sys.stderr)
        return 0 if ok else 1
    return 0


def cmd_verify(args) -> int:
    results = checks.run_all(lambda r: print(r.line(), flush=True))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------

REGION_KEYWORDS = {"DISK", "DISK_EXTERIOR", "HALFPLANE_GE", "HALFPLANE_LE", "CARDIOID", "POINTS",
                   "EMPTY", "FULL", "UNION", "INTERSECT", "AFFINE", "INVERT"}


def parse_plot_spec(text: str):
    """Region text or a class spec; returns ``(region, label)``."""
    first = text.strip().split(None, 1)[0] if text.strip() else ""
    if first in REGION_KEYWORDS:
        return rg.from_text(text), text.strip()
    derived = cl.derive_spec(text)
    return derived.region, text.strip()


def _viewport(region, window: float):
    """Square view box ``(x0, x1, y0, y1)``."""
    bounded = not region.has_infinity
    if bounded:
        try:
            r = rg.sup_modulus(region, 1e-3)
        except Exception:
            r = math.inf
        bounded = math.isfinite(r)
    if not bounded:
        return -window, window, -window, window
    net = np.asarray(region.boundary_net(1e-2, window * 10))
    net = net[np.isfinite(net)]
    pts = np.concatenate([net, [0.0]])
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    half = max(x1 - x0, y1 - y0, 1e-6) / 2 * 1.15
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    return cx - half, cx + half, cy - half, cy + half


def real_axis_landmarks(region, x0: float, x1: float, samples: int = 4001) -> list:
    """Points where the boundary crosses the real axis inside [x0, x1]."""
    xs = np.linspace(x0, x1, samples)
    inside = region.mask(xs.astype(complex), 1e-12)
    out = []
    if isinstance(region, rg.Points):
        return sorted(float(v.real) for v in region.array if abs(v.imag) < 1e-12 and x0 <= v.real <= x1)
    for k in np.flatnonzero(inside[1:] != inside[:-1]):
        lo, hi = xs[k], xs[k + 1]
        lo_in = inside[k]
        for _ in range(60):
            mid = (lo + hi) / 2
            if bool(region.mask(np.array([mid + 0j]), 1e-12)[0]) == lo_in:
                lo = mid
            else:
                hi = mid
        out.append(round((lo + hi) / 2, 9) + 0.0)
    # isolated single-point contacts (a disk touching the axis) show up as one inside sample
    return out


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def render_svg(region, label: str, width=480, height=480, grid=200, window=3.0, cloud=None) -> str:
    x0, x1, y0, y1 = _viewport(region, window)

    def px(x):
        return (x - x0) / (x1 - x0) * width

    def py(y):
        return (y1 - y) / (y1 - y0) * height

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f"<!-- srgtools {__version__} -->",
           f"<title>{_escape(label)}</title>",
           f'<rect width="{width}" height="{height}" fill="white"/>']
    # raster fill, one rect per horizontal run of inside cells
    cw, ch = width / grid, height / grid
    xs = x0 + (np.arange(grid) + 0.5) * (x1 - x0) / grid
    ys = y1 - (np.arange(grid) + 0.5) * (y1 - y0) / grid
    z = xs[None, :] + 1j * ys[:, None]
    m = region.mask(z.ravel(), 1e-12).reshape(grid, grid)
    out.append('<g fill="#9ecae1" stroke="none">')
    for i in range(grid):
        row = m[i]
        j = 0
        while j < grid:
            if row[j]:
                k = j
                while k < grid and row[k]:
                    k += 1
                out.append(f'<rect x="{j * cw:.2f}" y="{i * ch:.2f}" width="{(k - j) * cw:.2f}" '
                           f'height="{ch:.2f}"/>')
                j = k
            else:
                j += 1
    out.append("</g>")
    if isinstance(region, rg.Points):
        for v in region.array:
            out.append(f'<circle cx="{px(v.real):.2f}" cy="{py(v.imag):.2f}" r="4" fill="#3182bd"/>')
    # axes
    out.append('<g stroke="black" stroke-width="1">')
    if x0 <= 0 <= x1:
        out.append(f'<line x1="{px(0):.2f}" y1="0" x2="{px(0):.2f}" y2="{height}"/>')
    if y0 <= 0 <= y1:
        out.append(f'<line x1="0" y1="{py(0):.2f}" x2="{width}" y2="{py(0):.2f}"/>')
    out.append("</g>")
    out.append(f'<text x="{width - 24}" y="{py(0) - 6:.2f}" font-size="12">Re</text>')
    out.append(f'<text x="{px(0) + 6:.2f}" y="14" font-size="12">Im</text>')
    # landmarks
    for v in real_axis_landmarks(region, x0, x1):
        out.append(f'<circle cx="{px(v):.2f}" cy="{py(0):.2f}" r="3" fill="#de2d26"/>')
        out.append(f'<text x="{px(v) + 4:.2f}" y="{py(0) + 14:.2f}" font-size="11" '
                   f'class="landmark">{_fmt(v)}</text>')
    if cloud is not None:
        out.append('<g fill="#636363">')
        for v in cloud.points:
            if x0 <= v.real <= x1 and y0 <= v.imag <= y1:
                out.append(f'<circle cx="{px(v.real):.2f}" cy="{py(v.imag):.2f}" r="1.2"/>')
        out.append("</g>")
    if region.has_infinity:
        out.append(f'<text x="{width - 60}" y="24" font-size="16" class="infinity">∪{{∞}}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def cmd_plot(args) -> int:
    try:
        region, label = parse_plot_spec(args.spec)
    except (rg.RegionParseError, cl.ClassSpecError) as exc:
        raise UsageError(f"cannot parse {args.spec!r}: {exc}")
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    cloud = None
    if args.cloud:
        try:
            cloud = sp.SrgCloud.from_csv(Path(args.cloud).read_text(), source=args.cloud)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read cloud: {exc}")
    svg = render_svg(region, label, args.width, args.height, args.grid, args.window, cloud)
    _write(args, svg)
    return 0


VERBS = {"plot": cmd_plot, "rate": cmd_rate, "tightness": cmd_tightness, "sample": cmd_sample,
         "iterate": cmd_iterate, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _merge_config(args)
        return VERBS[args.verb](args)
    except (UsageError, rg.HypothesisViolation, sp.MissingOracle) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
