"""Command-line front end: oracle generation, indicators, fitting, reconstruction.

All floating output is serialized with 17 significant digits and fixed key
order, so repeated runs with the same configuration are byte-identical.
Validation failures exit 1, numerical failures exit 2; both write a
machine-readable error object to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import genus, green, indicators, infinity, linsys, oracles, reconstruct, shock, symmetric
from .geometry import LineParam, boundary_to_json, load_boundary, m_of_y, rho


class ValidationError(Exception):
    code = "E_VALIDATION"


class IOValidationError(ValidationError):
    code = "E_IO"


# -- deterministic JSON ---------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        return _fmt([float(v.real), float(v.imag)])
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_fmt(x)}" for k, x in v.items()) + "}"
    if v is None:
        return "null"
    raise TypeError(f"cannot serialize {type(v)}")


def dumps(obj) -> str:
    return _fmt(obj) + "\n"


def _write(obj, path):
    text = dumps(obj)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path):
    if not os.path.exists(path):
        raise IOValidationError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _boundary(path):
    if not os.path.exists(path):
        raise IOValidationError(f"boundary file not found: {path}")
    try:
        return load_boundary(path)
    except (KeyError, ValueError, json.JSONDecodeError) as e:
        raise ValidationError(f"malformed boundary file: {e}") from e


# -- subcommands ----------------------------------------------------------------


def cmd_make_oracle(args):
    if args.name not in oracles.ORACLES:
        raise ValidationError(
            f"unknown oracle {args.name!r}; choose from {sorted(oracles.ORACLES)}"
        )
    kw = {"n": args.samples}
    if args.name in ("interior-line", "exterior-line"):
        kw["a"] = args.a
    if args.name == "two-line":
        kw["a"], kw["b"] = args.a, args.b
    b = oracles.ORACLES[args.name](**kw)
    _write(boundary_to_json(b), args.out)
    return 0


def cmd_indicators(args):
    b = _boundary(args.boundary)
    lt = indicators.laurent_extract(b, kmax=args.kmax, mmax=args.mmax)
    z = LineParam(0.0, 2.5 * rho(b))
    g0 = indicators.G_k(b, z, 0)
    laurent = {}
    for k in range(lt.kmax + 1):
        for m in range(lt.mmax + 1):
            for n in range(min(m, lt.mmax) + 1):
                c = lt.coeffs[k, m, n]
                if abs(c) > 1e-14:
                    laurent[f"{k},{m},{n}"] = complex(c)
    out = {"delta": lt.delta, "G0": complex(g0), "laurent": laurent}
    _write(out, args.out)
    return 0


def _fit(b, args):
    return linsys.fit_infinity(
        b, dmu=args.dmu, r_max=args.rmax, accept_tol=args.tol, mmax=args.mmax
    )


def _fit_report(fit, h):
    return {
        "r": fit.r,
        "B": [complex(c) for c in fit.B],
        "A": [complex(c) for c in fit.A],
        "residual": fit.residual,
        "confined": fit.confined,
        "delta": h.delta,
        "cond": fit.cond,
    }


def cmd_fit_infinity(args):
    b = _boundary(args.boundary)
    fit, h, _ = _fit(b, args)
    _write(_fit_report(fit, h), args.out)
    return 0


def _cloud_rows(cloud):
    rows = []
    for p, src in zip(cloud.points, cloud.source):
        rows.append([
            p.w0.real, p.w0.imag, p.w1.real, p.w1.imag, p.w2.real, p.w2.imag,
            src.x.real if isinstance(src.x, complex) else float(np.real(src.x)),
            float(np.imag(src.x)), float(np.real(src.y)), float(np.imag(src.y)),
        ])
    return rows


CSV_HEADER = "w0_re,w0_im,w1_re,w1_im,w2_re,w2_im,src_x_re,src_x_im,src_y_re,src_y_im"


def _write_cloud(cloud, path):
    if path and path.endswith(".csv"):
        lines = [CSV_HEADER]
        for row in _cloud_rows(cloud):
            lines.append(",".join(format(v, ".17g") for v in row))
        text = "\n".join(lines) + "\n"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        obj = {
            "points": [
                {"w": [complex(p.w0), complex(p.w1), complex(p.w2)],
                 "src": [complex(s.x), complex(s.y)],
                 "multiplicity": m}
                for p, s, m in zip(cloud.points, cloud.source, cloud.multiplicity)
            ],
            "skipped": [
                {"z": [complex(z.x), complex(z.y)], "reason": msg}
                for z, msg in cloud.skipped
            ],
        }
        _write(obj, path)


def _do_reconstruct(b, args, fit=None, h=None):
    if args.p != "auto":
        p = int(args.p)
    else:
        if fit is None:
            fit, h, _ = _fit(b, args)
        p = indicators.sheet_count(h.delta, fit.r)
    germs = []
    if args.germs:
        germs = infinity.germs_from_json(_load(args.germs))
    fam = infinity.Pk_family(germs, max(p, 1))
    radii = tuple(float(t) for t in args.radii.split(","))
    xfracs = tuple(complex(t) for t in args.xfrac.split(","))
    threads = int(os.environ.get("CFR_THREADS", "1"))
    cloud = reconstruct.sweep(b, p, fam, radii=radii, angles=args.angles,
                              xfracs=xfracs, threads=threads)
    return cloud, p


def cmd_reconstruct(args):
    b = _boundary(args.boundary)
    cloud, _ = _do_reconstruct(b, args)
    _write_cloud(cloud, args.out)
    return 0


def cmd_pipeline(args):
    b = _boundary(args.boundary)
    lt = indicators.laurent_extract(b, kmax=2, mmax=args.mmax)
    fit, h, _ = _fit(b, args)
    cloud, p = _do_reconstruct(b, args, fit, h)
    report = {
        "delta": lt.delta,
        "fit": _fit_report(fit, h),
        "p": p,
        "points": len(cloud.points),
        "skipped": len(cloud.skipped),
    }
    if args.out and args.out not in ("-",):
        base, _ = os.path.splitext(args.out)
        _write_cloud(cloud, base + ".cloud" + (".csv" if args.csv else ".json"))
    _write(report, args.out)
    return 0


def cmd_shock_verify(args):
    b = _boundary(args.boundary)
    if args.p == "auto":
        fit, h, _ = _fit(b, args)
        p = indicators.sheet_count(h.delta, fit.r)
    else:
        p = int(args.p)
    if p < 1:
        raise ValidationError("shock-verify needs p >= 1")
    germs = []
    if args.germs:
        germs = infinity.germs_from_json(_load(args.germs))
    fam = infinity.Pk_family(germs, p)
    r = rho(b)
    y0 = complex(args.y0) if args.y0 else 2.5 * r
    hx = hy = args.step
    n = args.gridn
    xs = (np.arange(n) - n // 2) * hx
    ys = y0 + (np.arange(n) - n // 2) * hy
    S = [np.zeros((n, n), dtype=complex) for _ in range(p)]
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            fr = reconstruct.fiber(b, LineParam(complex(x), complex(y)), p, fam)
            N = np.array([np.sum(fr.roots ** k) for k in range(1, p + 1)])
            Sv = symmetric.power_to_elementary(N)
            for k in range(p):
                S[k][i, j] = Sv[k]
    if p == 1:
        # the single elementary symmetric function is the shock wave itself
        res = shock.shock_residual(S[0], hx, hy)
    else:
        res = shock.system_residual(S, hx, hy)
    _write({"p": p, "grid": n, "step": args.step, "residual": res}, args.out)
    return 0


def cmd_green(args):
    phi = np.array([[complex(p[0], p[1]) for p in row] for row in _load(args.phi)])
    center_s, radius_s = args.patch.split(",")
    model = green.CurveModel(phi, center=complex(center_s), radius=float(radius_s))
    spec = _load(args.targets)
    qs = complex(spec["q_star"][0], spec["q_star"][1])
    pts = [complex(p[0], p[1]) for p in spec["points"]]
    vals = [green.green_value(qs, q, model) for q in pts]
    _write({"q_star": qs, "values": vals}, args.out)
    return 0


def _omega_from_spec(spec):
    if spec == "dz":
        return lambda z: np.ones_like(z)
    if spec == "zdz":
        return lambda z: z
    if spec.startswith("z^") and spec.endswith("dz"):
        k = int(spec[2:-2])
        return lambda z: z ** k
    raise ValidationError(f"cannot parse omega spec {spec!r}")


def _lambda_from_file(path):
    """Radial rational density: {"num": [...], "den": [...]} in powers of |z|^2."""
    spec = _load(path)
    num = np.asarray(spec["num"], dtype=float)
    den = np.asarray(spec.get("den", [1.0]), dtype=float)

    def lam(z):
        r2 = np.abs(z) ** 2
        return (np.polynomial.polynomial.polyval(r2, num)
                / np.polynomial.polynomial.polyval(r2, den))

    return lam


def cmd_genus(args):
    model = genus.SurfaceModel(kind=args.model, r_in=args.rin)
    if args.lam in genus.LAMBDAS:
        lam = genus.LAMBDAS[args.lam]
    elif os.path.exists(args.lam):
        lam = _lambda_from_file(args.lam)
    else:
        raise ValidationError(f"unknown lambda {args.lam!r}")
    omega = _omega_from_spec(args.omega)
    integral = genus.chern_boundary_integral(omega, lam, model)
    out = {
        "model": args.model,
        "integral": integral,
        "tangency_defect": model.tangency_certificate(lam),
    }
    if args.genus_known is not None:
        out["q_inf"] = genus.q_infinity_estimate(
            integral, args.genus_known, model.n_components
        )
    _write(out, args.out)
    return 0


# -- argument parsing -----------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(
        prog="cfr",
        description="Reconstruction of bordered curves in CP2 from boundary data",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--boundary", required=True, help="boundary JSON file")
        p.add_argument("--out", default="-", help="output path (default stdout)")
        p.add_argument("--mmax", type=int, default=12)
        p.add_argument("--dmu", type=int, default=10)
        p.add_argument("--rmax", type=int, default=6)
        p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("make-oracle", help="write an analytic boundary fixture")
    p.add_argument("--name", required=True)
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--b", type=float, default=-1.0 / 3.0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_make_oracle)

    p = sub.add_parser("indicators", help="winding integer and Laurent table")
    common(p)
    p.add_argument("--kmax", type=int, default=3)
    p.set_defaults(fn=cmd_indicators)

    p = sub.add_parser("fit-infinity", help="recover (r, A, B) from boundary data")
    common(p)
    p.set_defaults(fn=cmd_fit_infinity)

    def recon_opts(p):
        p.add_argument("--p", default="auto", help="sheet count or 'auto'")
        p.add_argument("--radii", default="2.0,2.5,3.0", help="y radii / rho")
        p.add_argument("--angles", type=int, default=16)
        p.add_argument("--xfrac", default="0.0,0.2,-0.35", help="x as fractions of m(y)")
        p.add_argument("--germs", default=None, help="optional germ JSON")

    p = sub.add_parser("reconstruct", help="sweep lines and emit the point cloud")
    common(p)
    recon_opts(p)
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("pipeline", help="indicators -> fit-infinity -> reconstruct")
    common(p)
    recon_opts(p)
    p.add_argument("--csv", action="store_true", help="emit the cloud as CSV")
    p.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("shock-verify", help="finite-difference shock-system residual")
    common(p)
    p.add_argument("--p", default="auto")
    p.add_argument("--germs", default=None)
    p.add_argument("--y0", default=None)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--gridn", type=int, default=9)
    p.set_defaults(fn=cmd_shock_verify)

    p = sub.add_parser("green", help="Green values of a plane-curve patch")
    p.add_argument("--phi", required=True, help="JSON 2-D coefficient array")
    p.add_argument("--patch", default="0,1.0", help="center,radius in the z1 chart")
    p.add_argument("--targets", required=True, help='JSON {"q_star":..,"points":[..]}')
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_green)

    p = sub.add_parser("genus", help="Chern boundary integral on disc/annulus models")
    p.add_argument("--model", choices=("disc", "annulus"), default="disc")
    p.add_argument("--lambda", dest="lam", default="flat",
                   help="flat | fs | JSON file with radial rational density")
    p.add_argument("--omega", default="dz", help="dz | zdz | z^K dz")
    p.add_argument("--rin", type=float, default=0.5)
    p.add_argument("--genus-known", type=int, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_genus)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as e:
        sys.stderr.write(dumps({"error": e.code, "detail": str(e)}))
        return 1
    except (ValueError, RuntimeError, ZeroDivisionError, np.linalg.LinAlgError) as e:
        sys.stderr.write(dumps({"error": "E_NUMERIC",
                                "type": type(e).__name__, "detail": str(e)}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
