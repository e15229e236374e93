"""Command-line entry point: ``coamoeba-lab <subcommand> [options]``.

Exit codes: 0 success, 2 input error, 3 precondition failure, 4 counterexample.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import chains, coamoeba, homology, nonarch, render, tropical
from .errors import CoamoebaLabError, InputError
from .laurent import VarietySpec, parse_polynomial, to_text
from .polyhedral import AffineSubspace
from .torus import LiftedArrangement, lifts_with_members, make_box

EXIT_COUNTEREXAMPLE = 4


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _json(text, what="input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from exc


def _emit(args, data):
    text = json.dumps(data, indent=2, sort_keys=False, default=_default) + "\n"
    if args.out and not args.out.endswith((".svg", ".png", ".npy", ".csv")):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def _parse_box(text, n=None):
    if text is None:
        return None
    vals = [Fraction(v) for v in text.replace(":", ",").split(",") if v.strip()]
    if len(vals) == 2 and n:
        vals = vals * n
    if len(vals) % 2:
        raise InputError("--box needs lo,hi pairs")
    return make_box(vals)


def load_spec(args) -> VarietySpec:
    """Variety from ``--poly`` strings or an input file (JSON or one polynomial per line)."""
    if getattr(args, "poly", None):
        if not args.n:
            raise InputError("--poly needs --n")
        polys = [parse_polynomial(p, args.n) for p in args.poly]
    else:
        text = _read(args.input)
        if text.lstrip().startswith("{"):
            return VarietySpec.from_json(_json(text))
        lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not args.n:
            raise InputError("text input needs --n")
        polys = [parse_polynomial(p, args.n) for p in lines]
    cls = args.input_class or ("hypersurface" if len(polys) == 1 else "line")
    return VarietySpec(tuple(polys), len(polys), cls)


def load_k_spec(args) -> nonarch.KVarietySpec:
    if getattr(args, "poly", None):
        if not args.n:
            raise InputError("--poly needs --n")
        return nonarch.KVarietySpec.parse(args.poly, args.n)
    text = _read(args.input)
    if text.lstrip().startswith("{"):
        data = _json(text)
        if args.n and "n" not in data:
            data["n"] = args.n
        return nonarch.KVarietySpec.from_json(data)
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    if not args.n:
        raise InputError("text input needs --n")
    return nonarch.KVarietySpec.parse([ln for ln in lines if ln], args.n)


def load_arrangement(path) -> LiftedArrangement:
    data = _json(_read(path), "arrangement")
    if "shell" in data:
        data = data["shell"]
    return LiftedArrangement.from_json(data)


def _grid(args):
    if args.angular_steps or args.radial_steps:
        return coamoeba.SamplingGrid(angular_steps=args.angular_steps or 400,
                                     radial_steps=args.radial_steps or 401)
    return None


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args):
    spec = load_spec(args)
    out = spec.to_json()
    out["text"] = [to_text(p) for p in spec.polynomials]
    _emit(args, out)


def cmd_tropical(args):
    spec = load_spec(args)
    _emit(args, tropical.tropical_fan(spec).to_json())


def cmd_shell(args):
    spec = load_spec(args)
    sh = coamoeba.shell(spec)
    out = sh.to_json()
    out["describe"] = [c.describe() for c in sh.cosets]
    _emit(args, out)


def cmd_plset(args):
    spec = load_spec(args)
    _emit(args, coamoeba.phase_limit_set(spec, _grid(args)).to_json())


def cmd_sample(args):
    spec = load_spec(args)
    if args.pullback > 1:
        spec = spec.pullback(args.pullback)
    cloud = coamoeba.sample_coamoeba(spec, _grid(args))
    if args.out and args.out.endswith((".npy", ".csv")):
        cloud.save(args.out)
    summary = {"samples": len(cloud), "rejected": cloud.rejected, "n": cloud.ambient_dim,
               "source": cloud.source, "out": args.out}
    if not (args.out and args.out.endswith((".npy", ".csv"))):
        summary["points"] = cloud.points[:: max(1, len(cloud) // 1000)].tolist()
    _emit(args, summary)


def cmd_lift(args):
    arr = load_arrangement(args.input)
    n = arr.ambient_dim
    box = _parse_box(args.box, n) or arr.box or make_box([(0, 1)] * n)
    pairs = lifts_with_members(arr, box)
    _emit(args, {"box": [[str(lo), str(hi)] for lo, hi in box], "count": len(pairs),
                 "lifts": [dict(lift.to_json(), member=i) for i, lift in pairs]})


def cmd_certify(args):
    arr = load_arrangement(args.arrangement or args.input)
    plane = AffineSubspace.from_json(_json(_read(args.plane), "plane"))
    n = plane.ambient_dim
    box = _parse_box(args.box, n) or arr.box or make_box([(0, 2)] * n)
    cloud = None
    if args.cloud:
        pts = coamoeba.PointCloud.load(args.cloud).points
        offs = np.stack(np.meshgrid(*[np.arange(int(lo) - 1, int(hi) + 1) for lo, hi in box],
                                    indexing="ij"), axis=-1).reshape(-1, n)
        cloud = (pts[None, :, :] + offs[:, None, :]).reshape(-1, n)
    oracle = None
    if args.oracle_res:
        # the oracle must see the same obstacle as the certificate
        oracle = homology.oracle(box, args.oracle_res, cloud=cloud)
    rep = chains.certify_k_convexity(arr, plane, args.k, args.trials, args.seed, box,
                                     cloud=cloud, dilation=args.dilation, oracle=oracle)
    out = rep.to_json()
    out["counts"] = {}
    for c in rep.certificates:
        out["counts"][c.verdict] = out["counts"].get(c.verdict, 0) + 1
    _emit(args, out)
    return EXIT_COUNTEREXAMPLE if rep.counterexamples else 0


def cmd_oracle(args):
    arr = load_arrangement(args.set or args.input)
    n = arr.ambient_dim
    box = _parse_box(args.box, n) or arr.box
    if box is None:
        raise InputError("the oracle needs --box")
    members = [lift for _, lift in lifts_with_members(arr, box)]
    cx = homology.rasterize_complement(members, box, args.res, args.dilation)
    out = {"res": args.res, "members": len(members), "betti": homology.betti_numbers(cx)}
    if args.cycle:
        cyc = chains.PolyhedralChain.from_json(_json(_read(args.cycle), "cycle"))
        out["class_is_zero"] = homology.class_is_zero(cx, cyc)
    _emit(args, out)


def cmd_na_amoeba(args):
    spec = load_k_spec(args)
    _emit(args, nonarch.na_amoeba(spec).to_json())


def cmd_na_coamoeba(args):
    spec = load_k_spec(args)
    co = nonarch.na_coamoeba(spec, _grid(args))
    out = co.to_json()
    out["closure_distance"] = {str(k): v for k, v in co.closure_distances(seed=args.seed).items()}
    if args.cloud_out:
        np.save(args.cloud_out, co.minimal_cloud())
        out["cloud_out"] = args.cloud_out
    _emit(args, out)


def _layer(item):
    kind = item.get("kind", "cloud")
    if kind == "cloud":
        data = coamoeba.PointCloud.load(item["path"]).points if "path" in item \
            else np.asarray(item.get("points", []), dtype=float)
    elif kind == "cosets":
        data = load_arrangement(item["path"]) if "path" in item \
            else LiftedArrangement.from_json(item)
    else:
        raise InputError(f"unknown layer kind {kind!r}")
    return render.Layer(kind, data, item.get("color", "#1f4e99"), float(item.get("opacity", 0.6)))


def cmd_render(args):
    data = _json(_read(args.input), "render spec") if args.input else {}
    layers = [_layer(item) for item in data.get("layers", [])]
    if args.cloud:
        layers.append(render.Layer("cloud", coamoeba.PointCloud.load(args.cloud).points))
    if args.cosets:
        layers.append(render.Layer("cosets", load_arrangement(args.cosets), "#b2182b", 0.9))
    spec = render.RenderSpec(projection=data.get("projection", args.projection),
                             domain=int(data.get("domain", args.domain)),
                             azimuth=float(data.get("azimuth", 35.0)),
                             elevation=float(data.get("elevation", 25.0)), layers=layers,
                             projection_matrix=data.get("projection_matrix"))
    out = args.out or "figure.svg"
    info = render.render(spec, out)
    _emit(argparse.Namespace(out=None), {"out": out, "counts": info["counts"]})


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input file (JSON or text); '-' for stdin")
    common.add_argument("--out", "-o", help="output file (stdout when omitted)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--res", type=int, default=48, help="oracle grid cells per axis")
    common.add_argument("--box", help="working box as lo,hi[,lo,hi...]")

    variety = argparse.ArgumentParser(add_help=False)
    variety.add_argument("--poly", action="append", help="polynomial text (repeatable)")
    variety.add_argument("--n", type=int, help="ambient dimension for text input")
    variety.add_argument("--class", dest="input_class",
                         choices=["hypersurface", "line", "complete_intersection"])
    variety.add_argument("--angular-steps", type=int, default=0)
    variety.add_argument("--radial-steps", type=int, default=0)

    parser = argparse.ArgumentParser(prog="coamoeba-lab",
                                     description="Coamoebas, shells and convexity certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parents=(common,)):
        p = sub.add_parser(name, parents=list(parents), help=help_text)
        p.set_defaults(func=func)
        return p

    add("parse", cmd_parse, "normalize a variety specification", (common, variety))
    add("tropical", cmd_tropical, "tropical fan with initial systems", (common, variety))
    add("shell", cmd_shell, "shell cosets at maximal cones", (common, variety))
    add("plset", cmd_plset, "phase limit set strata", (common, variety))
    p = add("sample", cmd_sample, "sample the coamoeba", (common, variety))
    p.add_argument("--pullback", type=int, default=1, help="sample the m-fold pulled-back system")
    add("lift", cmd_lift, "enumerate lifted cosets in a box")
    p = add("certify", cmd_certify, "k-convexity certificates on a plane")
    p.add_argument("--arrangement")
    p.add_argument("--plane", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--cloud", help="sample cloud (.npy/.csv) added to the obstacle (k = 0)")
    p.add_argument("--dilation", type=float, default=0.02)
    p.add_argument("--oracle-res", type=int, default=0, help="grid for oracle escalation (0: off)")
    p = add("oracle", cmd_oracle, "cubical homology of a rasterized complement")
    p.add_argument("--set")
    p.add_argument("--cycle")
    p.add_argument("--dilation", type=float, default=None)
    add("na-amoeba", cmd_na_amoeba, "nonarchimedean amoeba of a line", (common, variety))
    p = add("na-coamoeba", cmd_na_coamoeba, "nonarchimedean coamoeba strata", (common, variety))
    p.add_argument("--cloud-out", help="save the minimal-face clouds (.npy)")
    p = add("render", cmd_render, "draw clouds and cosets (SVG or PNG)")
    p.add_argument("--cloud")
    p.add_argument("--cosets")
    p.add_argument("--domain", type=int, default=1)
    p.add_argument("--projection", default="coords-2d",
                   choices=["coords-2d", "coords-3d-orthographic"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args) or 0
    except CoamoebaLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InputError.exit_code
    return code


if __name__ == "__main__":
    sys.exit(main())
