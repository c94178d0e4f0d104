"""Command-line front end.

Subcommands::

    steklab make-mesh disk --h 0.05 --out disk.json --density-out dens.json
    steklab spectrum --mesh disk.json --density dens.json --k 6
    steklab converge --graph k3.json --epsilons 0.2,0.1,0.05 --k 3
    steklab chrom --surface torus --p 3
    steklab embed-verify --cert k6_klein

CSV goes to ``--out`` or stdout.  Any error prints one line to stderr and exits with status 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fem, graphs, mesh, tubular
from .chromatic import (
    check_certificate,
    chr0_bounds,
    chr0_exact,
    chr_closed,
    fixture_names,
    load_certificate,
    load_fixture,
    parse_surface,
)


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict[str, Path] = field(default_factory=dict)
    out: Path | None = None
    k: int | None = None
    rel_tol: float = fem.DEFAULT_REL_TOL
    epsilons: tuple[float, ...] = ()
    refine: int = 0

    def validate(self) -> None:
        for label, path in self.inputs.items():
            if not path.is_file():
                raise CliError(f"{label} file not found: {path}")
        if self.k is not None and self.k < 1:
            raise CliError("--k must be positive")
        if not self.rel_tol > 0:
            raise CliError("--rel-tol must be positive")
        if any(not e > 0 for e in self.epsilons):
            raise CliError("--epsilons must be positive")
        if self.refine < 0:
            raise CliError("--refine must be non-negative")


def _epsilons(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty epsilon list")
    return vals


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_make_mesh(args) -> str:
    h = args.h
    if args.shape == "disk":
        m = mesh.disk_mesh((0.0, 0.0), args.radius, h)
    elif args.shape == "annulus":
        m = mesh.annulus_mesh((0.0, 0.0), args.inner, args.radius, h)
    else:
        m = mesh.rectangle_mesh(0.0, math.pi, 0.0, args.height, h)
        top = args.height
        m = mesh.mark_edges(m, lambda mid: np.abs(mid[:, 1] - top) > 1e-12, mesh.NEUMANN)
    mesh.save_mesh(m, args.out)
    if args.density_out is not None:
        fem.save_densities(fem.DensitySpec.uniform(m), args.density_out)
    return ""


def cmd_spectrum(cfg: RunConfig) -> str:
    m = mesh.load_mesh(cfg.inputs["mesh"])
    dens = fem.load_densities(cfg.inputs["density"]) if "density" in cfg.inputs else fem.DensitySpec.uniform(m)
    for _ in range(cfg.refine):
        m, dens = mesh.refine_uniform(m), dens.refined()
    res = fem.solve_steklov_neumann(m, dens, cfg.k if cfg.k is not None else 6, cfg.rel_tol)
    return fem.spectrum_csv(res)


def cmd_converge(cfg: RunConfig, h: float, radius: float) -> str:
    G = graphs.load_graph(cfg.inputs["graph"])
    eps = cfg.epsilons or (0.2, 0.1, 0.05)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise CliError("--epsilons must be strictly decreasing")
    k = cfg.k if cfg.k is not None else G.n
    rows = tubular.convergence_study(G, eps, k, tubular.TubularParams(eps[0], radius, None, h))
    return tubular.study_csv(rows)


def cmd_chrom(surface: str, p: int) -> str:
    sig = parse_surface(surface)
    if p < 1:
        raise CliError("--p must be at least 1")
    lo, hi = chr0_bounds(sig, p)
    return _json({
        "surface": surface,
        "chi": sig.chi,
        "orientable": sig.orientable,
        "p": p,
        "chr": chr_closed(sig),
        "bounds": [lo, hi],
        "exact": chr0_exact(sig, p),
    })


def cmd_embed_verify(cert_arg: str) -> str:
    path = Path(cert_arg)
    if path.is_file():
        cert = load_certificate(path)
    elif cert_arg in fixture_names():
        cert = load_fixture(cert_arg)
    else:
        raise CliError(f"certificate not found: {cert_arg}")
    return _json(check_certificate(cert))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steklab", description="Steklov spectra, graph limits and relative chromatic numbers")
    sub = ap.add_subparsers(dest="command", required=True)

    mm = sub.add_parser("make-mesh", help="write a disk, annulus or strip mesh")
    mm.add_argument("shape", choices=("disk", "annulus", "strip"))
    mm.add_argument("--h", type=float, default=0.05)
    mm.add_argument("--radius", type=float, default=1.0)
    mm.add_argument("--inner", type=float, default=0.5)
    mm.add_argument("--height", type=float, default=1.0)
    mm.add_argument("--out", type=Path, required=True)
    mm.add_argument("--density-out", type=Path)

    sp = sub.add_parser("spectrum", help="Steklov(-Neumann) spectrum of a mesh")
    sp.add_argument("--mesh", type=Path, required=True)
    sp.add_argument("--density", type=Path)
    sp.add_argument("--k", type=int, default=6, help="highest eigenvalue index")
    sp.add_argument("--rel-tol", type=float, default=fem.DEFAULT_REL_TOL)
    sp.add_argument("--refine", type=int, default=0)
    sp.add_argument("--out", type=Path)

    cv = sub.add_parser("converge", help="tubular-domain convergence table for a graph")
    cv.add_argument("--graph", type=Path, required=True)
    cv.add_argument("--epsilons", type=_epsilons)
    cv.add_argument("--k", type=int, help="number of eigenvalues (default: all)")
    cv.add_argument("--h", type=float, default=0.05)
    cv.add_argument("--radius", type=float, default=0.5)
    cv.add_argument("--out", type=Path)

    ch = sub.add_parser("chrom", help="relative chromatic number of a surface with p boundary components")
    ch.add_argument("--surface", required=True)
    ch.add_argument("--p", type=int, default=1)
    ch.add_argument("--out", type=Path)

    ev = sub.add_parser("embed-verify", help="check an embedding certificate (file or packaged fixture name)")
    ev.add_argument("--cert", required=True)
    ev.add_argument("--out", type=Path)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "make-mesh":
            if not args.h > 0:
                raise CliError("--h must be positive")
            cmd_make_mesh(args)
            return 0
        if args.command == "spectrum":
            inputs = {"mesh": args.mesh}
            if args.density is not None:
                inputs["density"] = args.density
            cfg = RunConfig("spectrum", inputs, args.out, args.k, args.rel_tol, (), args.refine)
            cfg.validate()
            text = cmd_spectrum(cfg)
        elif args.command == "converge":
            cfg = RunConfig("converge", {"graph": args.graph}, args.out, args.k, epsilons=args.epsilons or ())
            cfg.validate()
            text = cmd_converge(cfg, args.h, args.radius)
        elif args.command == "chrom":
            text = cmd_chrom(args.surface, args.p)
        else:
            text = cmd_embed_verify(args.cert)
        _emit(text, args.out)
        return 0
    except (CliError, ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"steklab {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
