"""Command line entry point: ``latvol <command> ...``.

Exit codes: 0 success, 1 an asserted bound fails, 2 usage or input error,
3 numerical non-convergence.
"""
import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import catalog
from .catalog import LatticeFileError, UnknownLatticeError
from .checker import (
    check_bounds,
    check_planar,
    counterexample_ordering,
    format_reports,
    medial_truncation_family,
    table1,
    verify_medial,
    verify_parallel,
    verify_truncate,
)
from .entropy import ConvergenceError, DegeneratePolynomialError, LaurentPoly2, entropy_finite_size, entropy_logdet, mahler_measure
from .hyp import bipyramid_volume
from .invariants import AngleError, nu_bar, nu_bipyramid, right_angled_volume
from .torus_map import PlanarGraph, degree_multiset, faces, planar_patch, truncate, validate

EXIT_OK, EXIT_BOUND, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
TWO_PI = 2 * math.pi


@dataclasses.dataclass
class RunConfig:
    tol: float | None = None
    method: str = "logdet"
    fmt: str = "md"
    threads: int | None = None
    output: Path | None = None


class UsageError(Exception):
    pass


def _emit(cfg: RunConfig, text: str):
    if cfg.output is not None:
        cfg.output.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        print(text.rstrip("\n"))


def _entry(name_or_path: str):
    try:
        return catalog.lookup(name_or_path)
    except (UnknownLatticeError, FileNotFoundError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None


def cmd_list(args, cfg):
    lines = []
    for name in catalog.names():
        e = catalog.get(name)
        row = "-" if e.row is None else str(e.row)
        lines.append(f"{row:>3}  {name:18s} |V|={e.map.n_vertices:<3d} {' '.join(e.tags)}")
    _emit(cfg, "\n".join(lines))
    return EXIT_OK


def cmd_show(args, cfg):
    e = _entry(args.lattice)
    m = e.map
    diag = validate(m)
    fd = degree_multiset(w.degree for w in faces(m))
    lines = [
        f"name: {e.name}",
        f"V={m.n_vertices} E={m.n_edges} F={m.n_faces}",
        f"vertex degrees: {degree_multiset(m.degrees)}",
        f"face degrees: {fd}",
        "edges:",
    ]
    lines += [f"  {k}: {u} -> {v} shift {s}" for k, (u, v, s) in enumerate(m.edges())]
    lines += ["checks:"] + [f"  {ln}" for ln in str(diag).splitlines()]
    _emit(cfg, "\n".join(lines))
    return EXIT_OK


def cmd_invariants(args, cfg):
    e = _entry(args.lattice)
    m = e.map
    out = {
        "name": e.name,
        "n_vertices": m.n_vertices,
        "n_edges": m.n_edges,
        "nu_diamond/2pi": nu_bipyramid(m) / TWO_PI,
        "nu_bar/2pi": nu_bar(m) / TWO_PI,
    }
    ang = e.half_angles()
    if ang is not None:
        try:
            out["vol_perp/2pi"] = right_angled_volume(m, ang) / m.n_vertices / TWO_PI
        except AngleError as exc:
            print(f"warning: {exc}", file=sys.stderr)
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(out, indent=1))
    else:
        _emit(cfg, "\n".join(f"{k}: {v:.5f}" if isinstance(v, float) else f"{k}: {v}" for k, v in out.items()))
    return EXIT_OK


def cmd_entropy(args, cfg):
    e = _entry(args.lattice)
    m = e.map
    if cfg.method == "logdet":
        est = entropy_logdet(m, tol=cfg.tol or 1e-4)
    else:
        ns = [n for n in (8, 16, 32, 64, 128) if n <= args.max_n]
        if len(ns) < 3:
            raise UsageError("--max-n must be at least 32 for the finite-size fit")
        est = entropy_finite_size(m, ns)
    zfd = est.value if cfg.method == "logdet" else est.value * m.n_vertices
    text = (
        f"method: {est.method}\nz_fd: {zfd:.5f}\nz: {zfd / m.n_vertices:.5f}\n"
        f"error: {est.error:.1e}\nsamples: {est.samples}"
    )
    _emit(cfg, text)
    return EXIT_OK


def cmd_mahler(args, cfg):
    try:
        p = LaurentPoly2.load(args.polyfile)
    except (OSError, ValueError) as exc:
        raise UsageError(f"{args.polyfile}: {exc}") from None
    est = mahler_measure(p, tol=cfg.tol or 1e-5)
    _emit(cfg, f"m: {est.value:.5f}\n2pi*m: {TWO_PI * est.value:.5f}\nerror: {est.error:.1e}")
    return EXIT_OK


def cmd_check(args, cfg):
    e = _entry(args.lattice)
    rep = check_bounds(e, tol=cfg.tol or 1e-4)
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(rep.to_dict(), indent=1))
        return EXIT_BOUND if rep.failed else EXIT_OK
    lines = [f"{e.name}: nu_diamond/2pi={rep.nu_diamond:.5f} z={rep.z:.5f} nu_bar/2pi={rep.nu_bar:.5f}"]
    lines += [str(v) for v in rep.verdicts]
    if "vol_hyperbolic" in e.references:
        o = counterexample_ordering(e, tol=cfg.tol or 1e-4)
        lines.append(
            "ordering: vol {vol_hyperbolic:.5f} | 2pi z_fd {two_pi_zfd:.5f} | "
            "vol(G)+vol(G*) {vol_diamond_sum:.5f} | |E| v_oct {e_voct:.5f}".format(**o)
        )
    _emit(cfg, "\n".join(lines))
    return EXIT_BOUND if rep.failed else EXIT_OK


def cmd_table1(args, cfg):
    reps = table1(tol=cfg.tol or 1e-4, threads=cfg.threads)
    _emit(cfg, format_reports(reps, cfg.fmt))
    bad = [r.name for r in reps if r.error]
    for r in reps:
        if r.error:
            print(f"{r.name}: {r.error}", file=sys.stderr)
    if bad:
        return EXIT_NUMERIC
    return EXIT_BOUND if any(r.failed for r in reps) else EXIT_OK


def cmd_family(args, cfg):
    e = _entry(args.lattice)
    tol = cfg.tol or 1e-4
    checks = []
    if args.kind == "gs":
        checks.append(verify_parallel(e, args.s, tol))
    elif args.kind == "truncate":
        cur = e
        for _ in range(args.steps):
            checks.append(verify_truncate(cur, tol))
            m = truncate(cur.map)
            cur = catalog.CatalogEntry(name=f"truncate({cur.name})", map=m)
    else:
        if e.name == "hexagonal":
            checks.extend(medial_truncation_family(args.steps - 1))
        cur = e
        for _ in range(args.steps):
            checks.append(verify_medial(cur, tol))
            cur = catalog.CatalogEntry(name=f"truncate({cur.name})", map=truncate(cur.map))
    if cfg.fmt == "json":
        _emit(cfg, json.dumps([c.to_dict() for c in checks], indent=1))
    else:
        lines = []
        for c in checks:
            lines.append(f"[{c.name}]")
            lines += [f"  {v}" for v in c.verdicts]
        _emit(cfg, "\n".join(lines))
    return EXIT_BOUND if any(c.failed for c in checks) else EXIT_OK


def read_planar(path) -> PlanarGraph:
    """Edge list: ``u v`` per line; optional ``p id x y`` lines give positions.

    JSON files with ``edges`` (pairs) and optional ``positions`` are also read.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        doc = json.loads(text)
        return PlanarGraph(doc.get("positions"), [tuple(e) for e in doc["edges"]])
    edges, pos = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        try:
            if line[0] == "p":
                pos[int(line[1])] = (float(line[2]), float(line[3]))
            else:
                edges.append((int(line[0]), int(line[1])))
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{lineno}: cannot parse {raw.strip()!r}") from None
    positions = None
    if pos:
        positions = [pos[i] for i in range(len(pos))]
    return PlanarGraph(positions, edges)


def _planar_lines(g: PlanarGraph, rep):
    return [
        f"V={g.n_vertices} E={g.n_edges} bounded faces={len(g.bounded_faces())}",
        f"tau: {rep.tau}",
        f"vol(G)+vol(G*) over bounded faces: {rep.vol_diamond + rep.vol_diamond_dual:.5f}",
        f"nu_diamond/2pi: {(rep.vol_diamond + rep.vol_diamond_dual) / g.n_vertices / TWO_PI:.5f}",
        f"hyperbolic: {rep.hyperbolic}",
    ] + [str(v) for v in rep.verdicts]


def cmd_planar(args, cfg):
    if args.planar_cmd == "tau":
        try:
            g = read_planar(args.file)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from None
    else:
        e = _entry(args.lattice)
        g = planar_patch(e.map, args.n)
    rep = check_planar(g)
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(rep.to_dict(), indent=1))
    else:
        _emit(cfg, "\n".join(_planar_lines(g, rep)))
    return EXIT_BOUND if rep.failed else EXIT_OK


def cmd_bipyramid(args, cfg):
    try:
        _emit(cfg, f"{bipyramid_volume(args.n):.5f}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_export(args, cfg):
    _emit(cfg, catalog.dumps(_entry(args.lattice)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latvol", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    p.add_argument("--output", "-o", type=Path, default=None, help="write output to a file")
    p.add_argument("--verbose", "-v", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    sub.add_parser("list", help="catalog lattices")
    s = sub.add_parser("show", help="structure and validation of a lattice")
    s.add_argument("lattice")
    s = sub.add_parser("invariants", help="volume invariants of a lattice")
    s.add_argument("lattice")
    s.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    s = sub.add_parser("entropy", help="spanning tree entropy")
    s.add_argument("lattice")
    s.add_argument("--method", choices=("logdet", "finite-size"), default="logdet")
    s.add_argument("--tol", type=float)
    s.add_argument("--max-n", type=int, default=64)
    s = sub.add_parser("mahler", help="Mahler measure of a polynomial file")
    s.add_argument("polyfile")
    s.add_argument("--tol", type=float)
    s = sub.add_parser("check", help="check the volume bounds for one lattice")
    s.add_argument("lattice")
    s.add_argument("--tol", type=float)
    s.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    s = sub.add_parser("table1", help="all table rows")
    s.add_argument("--format", dest="fmt", choices=("md", "csv", "json"), default="md")
    s.add_argument("--tol", type=float)
    s = sub.add_parser("family", help="bounds for derived lattices")
    s.add_argument("kind", choices=("gs", "truncate", "medial"))
    s.add_argument("lattice")
    s.add_argument("--s", type=int, default=2)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--tol", type=float)
    s.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    s = sub.add_parser("planar", help="finite planar graphs")
    psub = s.add_subparsers(dest="planar_cmd", required=True)
    t = psub.add_parser("tau", help="tree count and bounds for a planar graph file")
    t.add_argument("file")
    t.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    t = psub.add_parser("patch", help="planar patch of a lattice")
    t.add_argument("lattice")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    s = sub.add_parser("bipyramid", help="volume of the regular ideal n-bipyramid")
    s.add_argument("n", type=int)
    s = sub.add_parser("export", help="lattice file for a catalog entry")
    s.add_argument("lattice")
    return p


COMMANDS = {
    "list": cmd_list,
    "show": cmd_show,
    "invariants": cmd_invariants,
    "entropy": cmd_entropy,
    "mahler": cmd_mahler,
    "check": cmd_check,
    "table1": cmd_table1,
    "family": cmd_family,
    "planar": cmd_planar,
    "bipyramid": cmd_bipyramid,
    "export": cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    threads = args.threads if args.threads is not None else os.cpu_count()
    cfg = RunConfig(
        tol=getattr(args, "tol", None),
        method=getattr(args, "method", "logdet"),
        fmt=getattr(args, "fmt", "md"),
        threads=threads,
        output=args.output,
    )
    if cfg.tol is not None and not cfg.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.cmd](args, cfg)
    except (UsageError, LatticeFileError, DegeneratePolynomialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        best = "" if exc.estimate is None else f" (best estimate {exc.estimate})"
        print(f"error: {exc}{best}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
