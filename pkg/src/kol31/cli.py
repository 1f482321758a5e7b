"""Command line interface: generate, verify, render, diffract.

Exit codes: 0 all checks passed / output written, 1 at least one check
failed, 2 usage error, 3 size-cap violation.  Every JSON report embeds the
package version, the echoed configuration, the seed, and the wall clock; all
floats are serialized to 12 significant digits so that identical
configuration and seed reproduce identical data files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .cubic import MEAN_TILE_LEN, embed_internal, embed_real
from .errors import DegenerateAlphabetError, ResourceCapError
from . import diffraction, modelset, sequences, windows
from .plotting import save_cloud_figure, save_spectrum_figure, save_tiling_figure

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPS = 3

CAP_N = 10**7
CAP_DEPTH = 40
CAP_SAMPLES = 10**8
CAP_BOUND = 10
CAP_RESOLUTION = 8192

PARAM_NAMES = {"none": "none", "equal": "equal_lengths", "integer": "integer_lengths"}

SUITES = (
    "identities",
    "points",
    "rhombus",
    "sequence",
    "density",
    "tiling",
    "subset",
    "symmetry",
    "deformation",
    "periodicity",
    "all",
)


def fmt(x: float) -> str:
    return f"{x:.12g}"


def atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-kol31-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj) -> None:
    atomic_write(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode())


def write_pgm(path: str, image: np.ndarray) -> None:
    h, w = image.shape
    atomic_write(path, b"P5\n%d %d\n255\n" % (w, h) + image.astype(np.uint8).tobytes())


def rasterize(
    points: np.ndarray,
    resolution: int,
    levels: np.ndarray | None = None,
    margin: float = 0.04,
) -> tuple[np.ndarray, dict]:
    """Binary/grayscale raster of a point cloud, white background.

    Returns (image, sidecar) where the sidecar records the affine pixel
    transform: pixel column = (re - origin_re) * scale, row counted downward
    from origin_im.
    """
    xmin, xmax = float(points.real.min()), float(points.real.max())
    ymin, ymax = float(points.imag.min()), float(points.imag.max())
    span = max(xmax - xmin, ymax - ymin)
    pad = span * margin
    xmin -= pad
    ymin -= pad
    xmax += pad
    ymax += pad
    scale = (resolution - 1) / max(xmax - xmin, ymax - ymin)
    w = int(round((xmax - xmin) * scale)) + 1
    h = int(round((ymax - ymin) * scale)) + 1
    img = np.full((h, w), 255, dtype=np.uint8)
    cols = np.clip(((points.real - xmin) * scale).astype(np.int64), 0, w - 1)
    rows = np.clip(((ymax - points.imag) * scale).astype(np.int64), 0, h - 1)
    if levels is None:
        img[rows, cols] = 0
    else:
        img[rows, cols] = levels
    sidecar = {
        "origin_re": float(xmin),
        "origin_im": float(ymax),
        "scale_px_per_unit": float(scale),
        "width": w,
        "height": h,
    }
    return img, sidecar


def cloud_csv(points: np.ndarray) -> bytes:
    lines = ["re,im"]
    lines += [f"{fmt(z.real)},{fmt(z.imag)}" for z in points]
    return ("\n".join(lines) + "\n").encode()


def sites_csv(site_set: modelset.SiteSet) -> bytes:
    lines = ["index,letter,pos_exact_c0,c1,c2,pos_real"]
    for i in range(len(site_set)):
        sp = site_set.site(i - site_set.offset)
        c = sp.pos
        lines.append(
            f"{sp.index},{sp.letter},{c.c0.numerator}/{c.c0.denominator},"
            f"{c.c1.numerator}/{c.c1.denominator},{c.c2.numerator}/{c.c2.denominator},"
            f"{fmt(embed_real(c))}"
        )
    return ("\n".join(lines) + "\n").encode()


def spectrum_csv(entries) -> bytes:
    lines = ["nA,nB,nC,k,re_c,im_c,intensity,method,stderr"]
    for e in entries:
        se = fmt(e.stderr) if e.stderr is not None else ""
        lines.append(
            f"{e.index[0]},{e.index[1]},{e.index[2]},{fmt(e.k)},"
            f"{fmt(e.amplitude.real)},{fmt(e.amplitude.imag)},{fmt(e.intensity)},"
            f"{e.method},{se}"
        )
    return ("\n".join(lines) + "\n").encode()


def _check(name, passed, seed=None, **extra) -> dict:
    entry = {"check": name, "status": "pass" if passed else "fail"}
    if seed is not None:
        entry["seed"] = seed
    for k, v in extra.items():
        if isinstance(v, float):
            v = float(fmt(v))
        entry[k] = v
    return entry


def _suite_identities() -> list[dict]:
    return [_check(c.name, c.passed, margin=0.0) for c in windows.verify_map_identities()]


def _suite_points() -> list[dict]:
    return [_check(c.name, c.passed, margin=0.0) for c in windows.verify_point_identities()]


def _suite_rhombus() -> list[dict]:
    return [
        _check(c.name, c.passed, margin=c.margin) for c in windows.rhombus_verify()
    ]


def _suite_sequence(n: int) -> list[dict]:
    a = sequences.kol_selfread(3, 1, n)
    b = sequences.kol_alternating(3, 1, n)
    c = sequences.decode_blocks(sequences.block_fixed_point((n + 1) // 2))[:n]
    checks = [
        _check("selfread == alternating", a == b, parameters={"n": n}),
        _check("selfread == block decoding", a == c, parameters={"n": n}),
    ]
    rl = sequences.verify_runlength_fixed(a)
    checks.append(_check("run-length fixed point", rl.ok, checked=rl.checked))
    m = min(n, 10**4)
    checks.append(
        _check("two-sided mirror symmetry", sequences.mirror_check(sequences.bi_word(3, 1, m)), parameters={"n": m})
    )
    return checks


def _suite_density(radius: float) -> list[dict]:
    dens = modelset.density_empirical(radius)
    target = embed_real(MEAN_TILE_LEN.inverse())
    return [
        _check(
            "site density == 1/mean-length",
            abs(dens - target) <= 1e-3,
            distance=abs(dens - target),
            parameters={"radius": radius, "density": float(fmt(dens)), "target": float(fmt(target))},
        )
    ]


def _suite_tiling(samples: int, seed: int) -> list[dict]:
    rep = windows.tiling_check(samples=samples, seed=seed)
    return [
        _check(
            "window tiles the plane (exactly-once cover)",
            rep.ok,
            seed=seed,
            parameters={
                "samples": rep.samples,
                "decided": rep.decided,
                "covered_once": rep.covered_once,
                "multi_covered": rep.multi_covered,
                "uncovered": rep.uncovered,
                "translates": rep.translates,
            },
        )
    ]


def _suite_subset(n: int, depth: int) -> list[dict]:
    rep = modelset.verify_window_subset(n, depth)
    return [
        _check(
            "site star images inside letter windows",
            rep.ok,
            parameters={
                "checked": rep.checked,
                "inside": rep.inside,
                "undecided": rep.undecided,
                "outside": rep.outside,
                "letter_mismatch": rep.letter_mismatch,
                "depth": depth,
            },
        )
    ]


def _suite_symmetry(radius: float) -> list[dict]:
    ok, pairs = modelset.inversion_symmetry_check(radius)
    return [
        _check(
            "A/B sites inversion symmetric about -t/2",
            ok,
            parameters={"window": radius, "pairs": pairs},
        )
    ]


def _suite_deformation(n: int) -> list[dict]:
    checks = []
    s = modelset.SiteSet(n // 2, n - n // 2)
    pe = diffraction.deformation_params("equal_lengths")
    dev = diffraction.deform_sites(s, pe)
    inv_l = MEAN_TILE_LEN.inverse()
    ints = [x * inv_l for x in dev]
    consecutive = all(v.is_integer() for v in ints) and [int(v.c0) for v in ints] == list(
        range(int(ints[0].c0), int(ints[0].c0) + len(ints))
    )
    checks.append(
        _check("equal-lengths deformation lands on mean-length integers", consecutive, parameters={"sites": len(s)})
    )
    pi_ = diffraction.deformation_params("integer_lengths")
    devi = diffraction.deform_sites(s, pi_)
    gaps_ok = all(
        devi[i + 1] - devi[i] == pi_.targets[str(s.letters[i])]
        for i in range(len(devi) - 1)
    )
    checks.append(_check("integer-lengths deformation has exact 6:4:2 gaps", gaps_ok))
    expected = {
        "equal a": (pe.a_num, 1.170516459),
        "equal |b|": (abs(pe.b_num), 0.128119827),
        "integer unit": (embed_real(pi_.targets["C"]) / 2, 0.492053533),
        "integer a": (pi_.a_num, -0.015892935),
        "integer b": (pi_.b_num, -0.359134953),
    }
    for name, (got, want) in expected.items():
        checks.append(
            _check(f"parameter {name} matches", abs(got - want) <= 1e-5, distance=abs(got - want))
        )
    return checks


def _suite_periodicity(radius: float) -> list[dict]:
    checks = []
    for name in ("equal_lengths", "integer_lengths"):
        rep = diffraction.periodicity_check(
            diffraction.deformation_params(name), radius=radius
        )
        checks.append(
            _check(f"{name}: shear bracket terms vanish exactly", rep.bracket_re_zero and rep.bracket_im_zero)
        )
        checks.append(
            _check(
                f"{name}: amplitudes repeat with the lattice period",
                rep.max_diff <= 0.01,
                margin=0.01 - rep.max_diff,
                parameters={"radius": radius, "max_diff": float(fmt(rep.max_diff))},
            )
        )
    rep0 = diffraction.periodicity_check(
        diffraction.deformation_params("none"), radius=radius
    )
    checks.append(
        _check(
            "undeformed spectrum is not periodic",
            rep0.max_diff > 0.01,
            parameters={"max_diff": float(fmt(rep0.max_diff))},
        )
    )
    return checks


def run_verify(args) -> int:
    t0 = time.time()
    suite = args.suite
    n = args.n or 10**5
    radius = args.L or (10**5 if suite == "density" else 1000.0)
    samples = args.samples or 10**4
    depth = args.depth or 30
    if n > CAP_N or depth > CAP_DEPTH or samples > CAP_SAMPLES:
        print("cap violation", file=sys.stderr)
        return EXIT_CAPS
    checks: list[dict] = []
    try:
        if suite in ("identities", "all"):
            checks += _suite_identities()
        if suite in ("points", "all"):
            checks += _suite_points()
        if suite in ("rhombus", "all"):
            checks += _suite_rhombus()
        if suite in ("sequence", "all"):
            checks += _suite_sequence(n if suite == "sequence" else 10**5)
        if suite in ("density", "all"):
            checks += _suite_density(radius if suite == "density" else 10**4)
        if suite in ("tiling", "all"):
            checks += _suite_tiling(samples if suite == "tiling" else 2000, args.seed)
        if suite in ("subset", "all"):
            checks += _suite_subset(n if suite == "subset" else 2000, depth)
        if suite in ("symmetry", "all"):
            checks += _suite_symmetry(radius if suite == "symmetry" else 1000.0)
        if suite in ("deformation", "all"):
            checks += _suite_deformation(min(n, 2000))
        if suite in ("periodicity", "all"):
            checks += _suite_periodicity(args.L or 2 * 10**4)
    except ResourceCapError as exc:
        print(f"cap violation: {exc}", file=sys.stderr)
        return EXIT_CAPS
    passed = all(c["status"] == "pass" for c in checks)
    report = {
        "version": __version__,
        "command": "verify",
        "config": {
            "suite": suite,
            "n": n,
            "L": radius,
            "samples": samples,
            "depth": depth,
        },
        "seed": args.seed,
        "wall_clock_s": round(time.time() - t0, 3),
        "checks": checks,
        "passed": passed,
    }
    out = args.out or f"verify-{suite}.json"
    write_json(out, report)
    for c in checks:
        tag = "PASS" if c["status"] == "pass" else "FAIL"
        extra = ""
        if "margin" in c:
            extra = f" margin={c['margin']}"
        elif "distance" in c:
            extra = f" distance={c['distance']}"
        print(f"[{tag}] {c['check']}{extra}")
    print(f"report: {out}")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def run_generate(args) -> int:
    if args.n is None:
        print("--n is required", file=sys.stderr)
        return EXIT_USAGE
    if args.n > CAP_N:
        print("cap violation: n", file=sys.stderr)
        return EXIT_CAPS
    try:
        if args.format == "csv":
            if (args.p, args.q) != (3, 1):
                print("site export exists only for the (3,1) pair", file=sys.stderr)
                return EXIT_USAGE
            out = args.out or f"sites-{args.n}.csv"
            atomic_write(out, sites_csv(modelset.SiteSet(args.n, 0)))
            print(f"wrote {out}")
            return EXIT_OK
        if args.blocks:
            if (args.p, args.q) != (3, 1):
                print("block words exist only for the (3,1) pair", file=sys.stderr)
                return EXIT_USAGE
            word = sequences.block_fixed_point(args.n)
        else:
            word = sequences.kol_selfread(args.p, args.q, args.n)
    except DegenerateAlphabetError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or f"kol-{args.p}{args.q}-{args.n}.txt"
    atomic_write(out, (word + "\n").encode())
    print(f"wrote {out}")
    return EXIT_OK


def run_render(args) -> int:
    t0 = time.time()
    depth = args.depth or 16
    if depth > CAP_DEPTH:
        print("cap violation: depth", file=sys.stderr)
        return EXIT_CAPS
    if args.resolution > CAP_RESOLUTION:
        print("cap violation: resolution", file=sys.stderr)
        return EXIT_CAPS
    which = args.which
    base = args.out or f"render-{which}"
    try:
        if which == "boundary":
            pts = windows.boundary_cloud(min(depth, 20), scope="window").points
            groups = None
        elif which == "tiling":
            cloud = windows.attractor_cloud("Omega", depth=min(depth, 16)).points
            t1 = embed_internal(windows.TILING_BASIS[0])
            t2 = embed_internal(windows.TILING_BASIS[1])
            groups = []
            for i in (-1, 0, 1):
                for j in (-1, 0, 1):
                    groups.append((cloud + i * t1 + j * t2, (i - j) % 3))
            pts = np.concatenate([g for g, _ in groups])
        else:
            pts = windows.attractor_cloud(which, depth=min(depth, 20)).points
            groups = None
    except ResourceCapError as exc:
        print(f"cap violation: {exc}", file=sys.stderr)
        return EXIT_CAPS
    if args.format == "csv":
        atomic_write(base + ".csv", cloud_csv(pts))
        print(f"wrote {base}.csv")
        return EXIT_OK
    if groups is None:
        img, sidecar = rasterize(pts, args.resolution)
    else:
        levels = np.concatenate(
            [np.full(len(g), 90 * (lv % 3), dtype=np.uint8) for g, lv in groups]
        )
        img, sidecar = rasterize(pts, args.resolution, levels=levels)
    write_pgm(base + ".pgm", img)
    sidecar.update(
        {
            "version": __version__,
            "command": "render",
            "config": {"which": which, "depth": depth, "resolution": args.resolution},
            "seed": args.seed,
            "wall_clock_s": round(time.time() - t0, 3),
        }
    )
    write_json(base + ".json", sidecar)
    if groups is None:
        save_cloud_figure(pts, base + ".png", title=f"window {which}")
    else:
        save_tiling_figure(groups, base + ".png")
    print(f"wrote {base}.pgm {base}.json {base}.png")
    return EXIT_OK


def run_diffract(args) -> int:
    t0 = time.time()
    if args.bound > CAP_BOUND:
        print("cap violation: bound", file=sys.stderr)
        return EXIT_CAPS
    if args.samples and args.samples > CAP_SAMPLES:
        print("cap violation: samples", file=sys.stderr)
        return EXIT_CAPS
    params = diffraction.deformation_params(PARAM_NAMES[args.params])
    method = {"window": "window", "sum": "sum", "both": "both"}[args.method]
    samples = args.samples or 10**5
    radius = args.L or 2 * 10**4
    try:
        entries = diffraction.spectrum_table(
            args.bound, params, method, samples=samples, radius=radius, seed=args.seed
        )
    except ResourceCapError as exc:
        print(f"cap violation: {exc}", file=sys.stderr)
        return EXIT_CAPS
    base = args.out or f"spectrum-{args.params}-{args.bound}"
    atomic_write(base + ".csv", spectrum_csv(entries))
    agreement = None
    if method == "both":
        by_index: dict = {}
        for e in entries:
            by_index.setdefault(e.index, {})[e.method] = e.amplitude
        agreement = max(
            abs(v["window"] - v["sum"]) for v in by_index.values() if len(v) == 2
        )
    summary = {
        "version": __version__,
        "command": "diffract",
        "config": {
            "params": params.name,
            "bound": args.bound,
            "method": method,
            "samples": samples,
            "L": radius,
        },
        "seed": args.seed,
        "peaks": len(entries),
        "shear": {"a": float(fmt(params.a_num)), "b": float(fmt(params.b_num))},
    }
    if agreement is not None:
        summary["cross_method_max_diff"] = float(fmt(agreement))
    if args.check_periodicity:
        if params.name == "none":
            print("periodicity check needs a deformation", file=sys.stderr)
            return EXIT_USAGE
        rep = diffraction.periodicity_check(params, radius=radius)
        summary["periodicity"] = {
            "bracket_re_exactly_zero": rep.bracket_re_zero,
            "bracket_im_exactly_zero": rep.bracket_im_zero,
            "max_amplitude_diff": float(fmt(rep.max_diff)),
            "period_index_shift": list(rep.period_index),
        }
    summary["wall_clock_s"] = round(time.time() - t0, 3)
    write_json(base + ".json", summary)
    sums = [e for e in entries if e.method == ("sum" if method != "window" else "window")]
    save_spectrum_figure(
        [e.k for e in sums],
        [e.intensity for e in sums],
        base + ".png",
        title=f"diffraction ({params.name})",
    )
    print(f"wrote {base}.csv {base}.json {base}.png")
    if args.check_periodicity:
        rep = summary["periodicity"]
        ok = rep["bracket_re_exactly_zero"] and rep["bracket_im_exactly_zero"]
        print(f"[{'PASS' if ok else 'FAIL'}] shear bracket terms exactly zero")
        return EXIT_OK if ok else EXIT_CHECK_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kol31",
        description="Kolakoski-(3,1) model set: sequences, windows, sites, diffraction",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=str, default=None)

    g = sub.add_parser("generate", help="write a Kolakoski word")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--blocks", action="store_true", help="write the block word (3,1 only)")
    g.add_argument(
        "--format",
        choices=("txt", "csv"),
        default="txt",
        help="txt: one letter per symbol; csv: tile sites with exact positions",
    )
    common(g)
    g.set_defaults(func=run_generate)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, required=True)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--L", type=float, default=None)
    v.add_argument("--depth", type=int, default=None)
    v.add_argument("--samples", type=int, default=None)
    common(v)
    v.set_defaults(func=run_verify)

    r = sub.add_parser("render", help="raster a window cloud (PGM + JSON + PNG)")
    r.add_argument(
        "--which",
        choices=("A", "B", "C", "AB", "Omega", "boundary", "tiling"),
        required=True,
    )
    r.add_argument("--depth", type=int, default=None)
    r.add_argument("--resolution", type=int, default=1024)
    r.add_argument("--format", choices=("pgm", "csv"), default="pgm")
    common(r)
    r.set_defaults(func=run_render)

    d = sub.add_parser("diffract", help="compute a diffraction spectrum table")
    d.add_argument("--params", choices=tuple(PARAM_NAMES), default="none")
    d.add_argument("--bound", type=int, default=3)
    d.add_argument("--method", choices=("window", "sum", "both"), default="sum")
    d.add_argument("--samples", type=int, default=None)
    d.add_argument("--L", type=float, default=None)
    d.add_argument("--check-periodicity", action="store_true")
    common(d)
    d.set_defaults(func=run_diffract)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ResourceCapError as exc:
        print(f"cap violation: {exc}", file=sys.stderr)
        return EXIT_CAPS


if __name__ == "__main__":
    sys.exit(main())
