"""Command-line front end: ``ldx <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 regime or degeneracy error. Errors are printed to stderr as one JSON object.
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import config as cfgmod
from .builtins import BUILTINS
from .errors import ConfigError, ExprSyntaxError, LdxError, UnknownIdentifier
from .frame import (
    arclengths,
    assumption_report,
    derived_invariants_at,
    frame_at,
    frame_gram,
    frame_jets,
    frenet_residuals,
)
from .heights import Kind, contact_order_with_slice, detect_Ak, height_jet
from .minkowski import pseudo_dot
from .parallel import pmap
from .surfaces import (
    DEFAULT_THETA_RANGE,
    Classification,
    argmin_jacobian_sv,
    sample_patch,
    singular_locus,
    slice_test,
)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_REGIME = 0, 1, 2, 3


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x) + 0.0   # no negative zero
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def write_csv(out, header, rows):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


# -- configuration ----------------------------------------------------------------


def resolve_config(args):
    if args.config and args.builtin:
        raise ConfigError("use either --config or --builtin, not both")
    if args.config:
        cfg = cfgmod.load(args.config)
    elif args.builtin:
        if args.builtin not in BUILTINS:
            raise ConfigError(f"unknown builtin {args.builtin!r}; choose from {', '.join(BUILTINS)}")
        cfg = cfgmod.builtin_config(args.builtin)
    else:
        raise ConfigError("no curve given: pass --config PATH or --builtin NAME")
    if args.tol:
        try:
            cfg.tol = cfg.tol.with_overrides(**cfgmod.parse_tol_overrides(args.tol))
        except KeyError as e:
            raise ConfigError(f"unknown tolerance {e}") from None
    if args.kind:
        cfg.kind = args.kind
    if args.range:
        cfg.range = cfgmod._pair(args.range, "--range")
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("--samples must be >= 1")
        cfg.samples = args.samples
    if args.theta_range:
        cfg.theta_range = cfgmod._pair(args.theta_range, "--theta-range")
    if args.theta_samples is not None:
        if args.theta_samples < 2:
            raise ConfigError("--theta-samples must be >= 2")
        cfg.theta_samples = args.theta_samples
    if args.csv:
        cfg.csv = args.csv
    if getattr(args, "obj", None):
        cfg.obj = args.obj
    return cfg


def compile_config(cfg):
    try:
        return cfg.compile()
    except (ExprSyntaxError, UnknownIdentifier) as e:
        raise ConfigError(f"expression error: {e}") from None
    except ValueError as e:
        if isinstance(e, LdxError):
            raise
        raise ConfigError(str(e)) from None


def param_grid(cfg, sys, at=None):
    if at:
        return [float(u) for u in at]
    a, b = cfg.range or sys.interval
    if cfg.samples == 1:
        return [a]
    return [float(u) for u in np.linspace(a, b, cfg.samples)]


class _Output:
    """stdout or a file opened at the end, so failures leave no partial file."""

    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO()

    def __enter__(self):
        return self.buf

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            text = self.buf.getvalue()
            if self.path:
                with open(self.path, "w", newline="\n") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        return False


# -- commands -------------------------------------------------------------------------

VEC = ("n_gamma", "t", "n1", "n2")
INV = ("k_n", "tau1", "tau2", "k_g", "tau_g")


def cmd_frame(cfg, at=None):
    sys_ = compile_config(cfg)
    us = param_grid(cfg, sys_, at)
    start = sys_.interval[0]
    s_vals = arclengths(sys_, us, start=start)

    def row(u):
        f = frame_at(sys_, u)
        d = derived_invariants_at(sys_, u)
        comps = [c for name in VEC for c in getattr(f, name)]
        return comps + [getattr(f, k) for k in INV] + [d.lambda0, d.lambda1, d.rho, d.rho_prime]

    rows = pmap(row, us)
    header = ["u", "s"] + [f"{n}_{i}" for n in VEC for i in range(4)] + list(INV) + [
        "lambda0", "lambda1", "rho", "rho_prime"]
    with _Output(cfg.csv) as out:
        write_csv(out, header, ([u, s] + r for u, s, r in zip(us, s_vals, rows)))
    return EXIT_OK


def cmd_invariants(cfg, at=None):
    sys_ = compile_config(cfg)
    us = param_grid(cfg, sys_, at)
    s_vals = arclengths(sys_, us, start=sys_.interval[0])
    flags = assumption_report(sys_, us)

    def row(u):
        f = frame_at(sys_, u)
        d = derived_invariants_at(sys_, u)
        return [getattr(f, k) for k in INV] + [
            d.lambda0, d.lambda1, d.lambda2, d.rho, d.rho_prime, d.mixed_torsion]

    rows = pmap(row, us)
    header = ["u", "s"] + list(INV) + [
        "lambda0", "lambda1", "lambda2", "rho", "rho_prime", "mixed_torsion",
        "regime", "nondegenerate"]
    with _Output(cfg.csv) as out:
        write_csv(out, header, ([u, s] + r + [fl.regime, fl.nondegenerate]
                                for u, s, r, fl in zip(us, s_vals, rows, flags)))
    return EXIT_OK


def cmd_locus(cfg):
    sys_ = compile_config(cfg)
    locus = singular_locus(sys_, cfg.kind, cfg.range, cfg.samples)
    header = ["u", "s", "theta", "x0", "x1", "x2", "x3", "class",
              "lambda0", "lambda1", "rho", "rho_prime", "status", "refined"]
    with _Output(cfg.csv) as out:
        write_csv(out, header, (
            [p.u, p.s, p.theta, *p.position, p.classification.value, p.witness.lambda0,
             p.witness.lambda1, p.witness.rho, p.witness.rho_prime, p.status, p.refined]
            for p in locus.points))
    return EXIT_OK


def project(kind, x, projection="auto"):
    """3D image of a surface point, or None when the projection is undefined."""
    if projection == "auto":
        projection = "poincare" if kind is Kind.HYPERBOLIC else "drop_x0"
    if not all(math.isfinite(c) for c in x):
        return None
    if projection == "poincare":
        if x[0] < 0.0:
            return None
        return (x[1] / (1.0 + x[0]), x[2] / (1.0 + x[0]), x[3] / (1.0 + x[0]))
    return (x[1], x[2], x[3])


PROJECTION_NOTE = {
    "poincare": "Poincare ball (x1, x2, x3) / (1 + x0); samples with x0 < 0 dropped",
    "drop_x0": "orthographic (x1, x2, x3), x0 dropped",
}


def mesh_obj(patch, projection, digest):
    """OBJ text for a patch: grid quads split in two, undefined vertices dropped."""
    kind = patch.kind
    if projection == "auto":
        projection = "poincare" if kind is Kind.HYPERBOLIC else "drop_x0"
    n_u, n_t = patch.shape
    index = {}
    verts = []
    for i in range(n_u):
        for j in range(n_t):
            p = project(kind, patch.positions[i, j], projection)
            if p is not None:
                verts.append(p)
                index[(i, j)] = len(verts)
    faces = []
    for i in range(n_u - 1):
        for j in range(n_t - 1):
            a, b = index.get((i, j)), index.get((i + 1, j))
            c, d = index.get((i + 1, j + 1)), index.get((i, j + 1))
            if a and b and c:
                faces.append((a, b, c))
            if a and c and d:
                faces.append((a, c, d))
    lines = [
        "# ldx surface mesh",
        f"# kind: {kind.value}",
        f"# projection: {projection}: {PROJECTION_NOTE[projection]}",
        f"# grid: {n_u} x {n_t}",
        f"# dropped vertices: {n_u * n_t - len(verts)}",
        f"# config sha256: {digest}",
    ]
    lines += ["v %s %s %s" % tuple(fmt(c) for c in p) for p in verts]
    lines += ["f %d %d %d" % f for f in faces]
    return "\n".join(lines) + "\n", len(verts), len(faces)


def cmd_surface(cfg):
    sys_ = compile_config(cfg)
    kind = Kind(cfg.kind)
    patch = sample_patch(sys_, kind, cfg.range, cfg.theta_range, cfg.samples, cfg.theta_samples)
    bad = [s for s in patch.status if s != "ok"]
    if len(bad) == len(patch.status):
        raise _regime_error(bad[0], f"{kind.value} surface undefined on the whole grid")
    text, _, _ = mesh_obj(patch, cfg.projection, cfg.digest())
    if cfg.obj:
        with open(cfg.obj, "w", newline="\n") as fh:
            fh.write(text)
    header = ["u", "s", "theta", "x0", "x1", "x2", "x3", "residual", "min_sv", "status"]
    n_u, n_t = patch.shape
    with _Output(cfg.csv) as out:
        write_csv(out, header, (
            [patch.u[i], patch.s[i], patch.theta[j], *patch.positions[i, j],
             patch.residuals[i, j], patch.min_sv[i, j], patch.status[i]]
            for i in range(n_u) for j in range(n_t)))
    return EXIT_OK


def _regime_error(name, message):
    from . import errors

    cls = getattr(errors, name, LdxError)
    return cls(message) if issubclass(cls, LdxError) else LdxError(message)


def classify_report(cfg):
    sys_ = compile_config(cfg)
    kind = Kind(cfg.kind)
    locus = singular_locus(sys_, kind, cfg.range, cfg.samples)
    counts = {}
    for p in locus.points:
        key = p.classification.value if p.status == "ok" else p.status
        counts[key] = counts.get(key, 0) + 1
    special = []
    for p in locus.valid():
        if p.classification in (Classification.CUSPIDAL_EDGE, Classification.SLICE_DEGENERATE):
            continue
        rep = detect_Ak(sys_, kind, p.position, p.u)
        c = float(pseudo_dot(frame_jets(sys_, p.u).gamma.value(), p.position))
        special.append({
            "u": p.u, "s": p.s, "theta": p.theta, "class": p.classification.value,
            "oracle_order": rep.order,
            "slice_contact_order": contact_order_with_slice(sys_, p.position, c, p.u),
            "lambda0": p.witness.lambda0, "lambda1": p.witness.lambda1,
            "rho": p.witness.rho, "rho_prime": p.witness.rho_prime,
        })
    return {
        "curve": cfg.name, "kind": kind.value, "samples": len(locus.points),
        "counts": dict(sorted(counts.items())), "slice_degenerate": locus.slice_degenerate,
        "max_abs_rho": locus.max_rho, "rho_roots": list(locus.roots), "special_points": special,
    }


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def cmd_classify(cfg):
    report = classify_report(cfg)
    with _Output(cfg.csv) as out:
        out.write(json.dumps(_clean(report), indent=2, sort_keys=False) + "\n")
    return EXIT_OK


# -- verification suite ----------------------------------------------------------------


def verify_checks(cfg):
    """Yield (name, passed, detail) for every check of the suite."""
    try:
        sys_ = compile_config(cfg)
    except LdxError as e:
        yield ("compile", False, f"{type(e).__name__}: {e}")
        return
    yield ("compile", True, "curve system valid")
    tol = sys_.tol
    us = param_grid(cfg, sys_)

    gram = fr = 0.0
    for u in us:
        gram = max(gram, float(np.max(np.abs(frame_gram(frame_at(sys_, u)) - np.diag([-1.0, 1, 1, 1])))))
        fr = max(fr, max(frenet_residuals(sys_, u).values()))
    yield ("frame orthonormality", gram < 1e-9, f"max Gram deviation {gram:.3g}")
    yield ("structure equations", fr < 1e-7, f"max residual {fr:.3g}")

    flags = assumption_report(sys_, us)
    kind = Kind(cfg.kind)
    in_regime = [f for f in flags if f.regime == kind.value]
    if not in_regime:
        yield (f"{kind.value} regime", True, "surface undefined on this curve; surface checks skipped")
        return

    patch = sample_patch(sys_, kind, cfg.range, cfg.theta_range,
                         min(cfg.samples, 20), min(cfg.theta_samples, 20))
    worst = res = 0.0
    for i, u in enumerate(patch.u):
        if patch.status[i] != "ok":
            continue
        for j in range(len(patch.theta)):
            h = height_jet(sys_, kind, patch.positions[i, j], float(u))
            worst = max(worst, abs(h.derivative(0)), abs(h.derivative(1)))
            res = max(res, abs(patch.residuals[i, j]))
    yield ("pseudo-sphere residual", res < 1e-9, f"max {res:.3g}")
    yield ("discriminant property", worst < 1e-9, f"max |h|, |h'| {worst:.3g}")

    locus = singular_locus(sys_, kind, cfg.range, cfg.samples)
    pts = locus.valid()
    if not pts:
        yield ("singular locus", True, "locus undefined on this curve; locus checks skipped")
        return
    bad = []
    for p in pts:
        order = detect_Ak(sys_, kind, p.position, p.u).order
        want = {Classification.CUSPIDAL_EDGE: (2,), Classification.SWALLOWTAIL: (3,),
                Classification.CUSPIDAL_BEAKS: (3,)}.get(p.classification)
        if want and order not in want:
            bad.append((p.u, p.classification.value, order))
        if p.classification is Classification.SLICE_DEGENERATE and order < 2:
            bad.append((p.u, p.classification.value, order))
    yield ("classification vs oracle", not bad, f"{len(pts)} points, mismatches {bad[:3]}")

    lo, hi = DEFAULT_THETA_RANGE[kind] if kind is Kind.HYPERBOLIC else (-math.pi / 2, math.pi / 2)
    worst = 0.0
    step = max(1, len(pts) // 10)
    for p in pts[::step]:
        th = argmin_jacobian_sv(sys_, kind, p.u, max(lo, p.theta - 0.5), min(hi, p.theta + 0.5))
        worst = max(worst, abs(th - p.theta))
    yield ("singularity criterion", worst < 1e-6, f"max |argmin - theta| {worst:.3g}")

    try:
        rep = slice_test(sys_, kind, cfg.range, cfg.samples)
        yield ("slice characterizations agree", rep.consistent,
               ", ".join(f"{k}={v}" for k, v in rep.conditions.items()))
    except LdxError as e:
        yield ("slice characterizations agree", True, f"not applicable: {e}")


def cmd_verify(cfg):
    failed = 0
    for name, ok, detail in verify_checks(cfg):
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += not ok
    print(f"{'FAILED' if failed else 'OK'}: {failed} check(s) failed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_examples(name=None):
    if name:
        if name not in BUILTINS:
            raise ConfigError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")
        sys.stdout.write(cfgmod.builtin_toml(name))
        return EXIT_OK
    for b in BUILTINS.values():
        print(f"{b.name:16s} {b.kind:11s} {b.description}")
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="ldx", description=(
        "Darboux-frame invariants, hyperbolic and de Sitter surfaces and their "
        "singularities for curves on spacelike hypersurfaces of Minkowski 4-space."))
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True, theta=False, obj=False, at=False):
        sp.add_argument("--config", metavar="PATH", help="TOML run configuration")
        sp.add_argument("--builtin", metavar="NAME", help="use a builtin curve (see 'examples')")
        sp.add_argument("--kind", choices=cfgmod.KINDS)
        sp.add_argument("--tol", action="append", metavar="NAME=VALUE", default=[])
        sp.add_argument("--csv", metavar="PATH", help="write CSV here instead of stdout")
        if grid:
            sp.add_argument("--range", nargs=2, type=float, metavar=("A", "B"),
                            help="curve-parameter range")
            sp.add_argument("--samples", type=int, metavar="N")
        if theta:
            sp.add_argument("--theta-range", nargs=2, type=float, metavar=("A", "B"))
            sp.add_argument("--theta-samples", type=int, metavar="N")
        if obj:
            sp.add_argument("--obj", metavar="PATH", help="write an OBJ mesh")
        if at:
            sp.add_argument("--at", nargs="+", type=float, metavar="U",
                            help="explicit curve-parameter values")
        sp.set_defaults(theta_range=None, theta_samples=None)

    common(sub.add_parser("frame", help="Darboux frame and invariants as CSV"), at=True)
    common(sub.add_parser("invariants", help="invariants and regime flags as CSV"), at=True)
    common(sub.add_parser("locus", help="singular locus with classification as CSV"))
    common(sub.add_parser("surface", help="surface samples as CSV and an OBJ mesh"),
           theta=True, obj=True)
    common(sub.add_parser("classify", help="JSON summary of special singular points"))
    common(sub.add_parser("verify", help="run the invariant suite"), theta=True)
    ex = sub.add_parser("examples", help="list builtin curves or print one as TOML")
    ex.add_argument("name", nargs="?")
    return p


def _fail(err, code):
    payload = {"error": getattr(err, "code", "E_INTERNAL"), "type": type(err).__name__,
               "message": str(err)}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "examples":
            return cmd_examples(args.name)
        cfg = resolve_config(args)
        if args.command == "frame":
            return cmd_frame(cfg, args.at)
        if args.command == "invariants":
            return cmd_invariants(cfg, args.at)
        if args.command == "locus":
            return cmd_locus(cfg)
        if args.command == "surface":
            return cmd_surface(cfg)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
    except ConfigError as e:
        return _fail(e, EXIT_CONFIG)
    except LdxError as e:
        return _fail(e, EXIT_REGIME)
    except OSError as e:
        return _fail(ConfigError(f"{e.filename}: {e.strerror}"), EXIT_CONFIG)
    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
