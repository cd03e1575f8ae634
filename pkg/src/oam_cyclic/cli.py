"""Command-line interface: ``oam-cyclic {simulate,verify,resources,synth}``.

Exit status: 0 success / all points passed, 1 verification failure,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .elements import fourier_matrix
from .errors import InvalidArgumentError
from .formats import (
    DEFAULT_GRID,
    FORMAT_VERSION,
    FormatError,
    mesh_records,
    network_records,
    parse_grid,
    parse_state,
    state_records,
    write_lines,
)
from .mesh import Mesh, fourier_mesh, mesh_unitary, substitute_fourier
from .networks import Network, apply_network, build_gate, tally_resources
from .state import CodingSubspace, PhotonState
from .verify import VerificationReport, verify_gate

log = logging.getLogger("oam_cyclic")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class GateSpec:
    d: int
    p: int = 1
    ell0: int = 0
    variant: str = "a"
    config: str = "mz"
    use_mesh_fourier: bool = False
    scheme: Optional[str] = None

    def __post_init__(self):
        if self.d < 2:
            raise InvalidArgumentError(f"d must be >= 2, got {self.d}")
        if self.p < 1:
            raise InvalidArgumentError(f"p must be >= 1, got {self.p}")
        if self.variant not in ("a", "b"):
            raise InvalidArgumentError(f"variant must be a or b, got {self.variant!r}")
        if self.config not in ("mz", "michelson"):
            raise InvalidArgumentError(f"config must be mz or michelson, got {self.config!r}")

    @property
    def subspace(self) -> CodingSubspace:
        return CodingSubspace(self.d, self.p, self.ell0)

    def mesh_scheme(self) -> str:
        if self.scheme:
            return self.scheme
        return "butterfly" if self.d & (self.d - 1) == 0 else "rectangular"

    def network(self) -> Network:
        net = build_gate(self.d, self.p, self.ell0, self.variant, self.config)
        if self.use_mesh_fourier:
            net = substitute_fourier(net, self.mesh_scheme())
        return net


def simulate(spec: GateSpec, entries) -> tuple[PhotonState, list[tuple[int, int]]]:
    """Run the gate on a state; also return the input kets outside the coding set."""
    state = PhotonState.from_entries(spec.d, entries)
    norm = state.norm()
    if abs(norm - 1.0) > 1e-6:
        log.warning("input norm %.12g differs from 1; normalizing", norm)
        state = state.normalized()
    sub = spec.subspace
    out_of_domain = [
        (lab.ell, lab.mode) for lab in sorted(state) if lab.mode != 0 or lab.ell not in sub
    ]
    return apply_network(spec.network(), state), out_of_domain


def cmd_simulate(args) -> int:
    spec = _spec(args)
    if args.input is None:
        raise FormatError("simulate needs --in FILE with a JSON array of [ell, mode, re, im]")
    text = Path(args.input).read_text(encoding="utf-8")
    out, ood = simulate(spec, parse_state(text, spec.d, args.input))
    for ell, mode, a in out.sorted_entries():
        print(f"{ell} {mode} {a.real:.17g} {a.imag:.17g} |a|={abs(a):#.15g}")
    if ood:
        print("# out-of-domain input kets: " + " ".join(f"|{e},{m}>" for e, m in ood))
    if args.out:
        write_lines(
            args.out,
            [
                {
                    "format_version": FORMAT_VERSION,
                    "kind": "state",
                    "d": spec.d,
                    "out_of_domain": [list(x) for x in ood],
                    "amplitudes": state_records(out),
                }
            ],
        )
    return EXIT_OK


def grid_points(grid: dict) -> list[GateSpec]:
    return [
        GateSpec(d, p, ell0, variant, config)
        for d, p, ell0, variant, config in itertools.product(
            grid["d"], grid["p"], grid["ell0"], grid["variant"], grid["config"]
        )
    ]


def run_verify(
    points: Sequence[GateSpec], tol: float, trials: int, seed: int
) -> list[VerificationReport]:
    return [verify_gate(s.network(), s.subspace, trials, tol, seed) for s in points]


def cmd_verify(args) -> int:
    if args.grid:
        grid = parse_grid(Path(args.grid).read_text(encoding="utf-8"), args.grid)
        points = grid_points(grid)
    elif args.d is not None:
        points = [_spec(args)]
    else:
        points = grid_points(DEFAULT_GRID)
    if args.mesh_fourier:
        points = [
            GateSpec(s.d, s.p, s.ell0, s.variant, s.config, True, args.scheme) for s in points
        ]
    reports = run_verify(points, args.tol, args.trials, args.seed)
    n_pass = sum(r.passed for r in reports)
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "verification",
        "tol": args.tol,
        "trials": args.trials,
        "seed": args.seed,
        "points": len(reports),
        "passed": n_pass,
        "all_passed": n_pass == len(reports),
    }
    if args.out:
        write_lines(args.out, [header] + [r.to_dict() for r in reports])
    for r in reports:
        if not r.passed:
            p = r.params
            why = r.diagnostic or (
                f"decoupling_min={r.decoupling_min:.3e} "
                f"coherence_residual={r.coherence_residual:.3e} "
                f"unitarity_residual={r.unitarity_residual:.3e}"
            )
            print(f"FAIL d={p['d']} p={p['p']} ell0={p['ell0']} {p['variant']}/{p['config']}: {why}")
    print(f"{n_pass}/{len(reports)} points passed at tol={args.tol:g}")
    return EXIT_OK if n_pass == len(reports) else EXIT_FAIL


def resource_summary(spec: GateSpec) -> dict:
    net = build_gate(spec.d, spec.p, spec.ell0, spec.variant, spec.config)
    tally = tally_resources(net)
    summary = {
        "sorters": tally.sorter_count,
        "spps": tally.spp_count,
        "spp_orders": list(tally.spp_list),
        "fourier": tally.fourier_count,
        "phases": tally.dove_phase_count,
        "circulators": tally.circulator_count,
        "retroreflectors": tally.retroreflector_count,
    }
    if spec.use_mesh_fourier:
        scheme = spec.mesh_scheme()
        mesh = fourier_mesh(spec.d, scheme)
        summary["mesh"] = {
            "scheme": scheme,
            "beamsplitters_per_fourier": mesh.beamsplitter_count,
            "phase_shifters_per_fourier": mesh.phase_shifter_count,
            "beamsplitters_total": mesh.beamsplitter_count * tally.fourier_count,
            "phase_shifters_total": mesh.phase_shifter_count * tally.fourier_count,
        }
    return summary


def cmd_resources(args) -> int:
    spec = _spec(args)
    s = resource_summary(spec)
    print(f"gate X_{spec.d}({spec.p}) ell0={spec.ell0} variant={spec.variant} config={spec.config}")
    print(f"  sorters          {s['sorters']}")
    print(f"  SPPs             {s['spps']}  orders {s['spp_orders']}")
    print(f"  Fourier gates    {s['fourier']}")
    print(f"  Z_d phases       {s['phases']}")
    print(f"  circulators      {s['circulators']}")
    print(f"  retro-reflectors {s['retroreflectors']}")
    if "mesh" in s:
        m = s["mesh"]
        print(f"  mesh ({m['scheme']}): {m['beamsplitters_per_fourier']} beamsplitters and "
              f"{m['phase_shifters_per_fourier']} phase shifters per Fourier gate; "
              f"{m['beamsplitters_total']} beamsplitters total")
    if args.out:
        records = network_records(spec.network())
        records[0]["resources"] = s
        write_lines(args.out, records)
    return EXIT_OK


def synth(d: int, scheme: str) -> tuple[Mesh, float]:
    mesh = fourier_mesh(d, scheme)
    residual = float(np.max(np.abs(mesh_unitary(mesh) - fourier_matrix(d))))
    return mesh, residual


def cmd_synth(args) -> int:
    if args.d is None:
        raise FormatError("synth needs --d")
    scheme = args.scheme or "rectangular"
    mesh, residual = synth(args.d, scheme)
    print(f"{scheme} Fourier mesh, d={args.d}: {mesh.beamsplitter_count} beamsplitters, "
          f"{mesh.phase_shifter_count} phase shifters, residual {residual:.3e}")
    if args.out:
        write_lines(args.out, mesh_records(mesh, residual))
    return EXIT_OK


def _spec(args) -> GateSpec:
    if args.d is None:
        raise FormatError("--d is required")
    return GateSpec(
        args.d, args.p, args.ell0, args.variant, args.config, args.mesh_fourier, args.scheme
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int)
    common.add_argument("--p", type=int, default=1)
    common.add_argument("--ell0", type=int, default=0)
    common.add_argument("--variant", choices=("a", "b"), default="a")
    common.add_argument("--config", choices=("mz", "michelson"), default="mz")
    common.add_argument("--mesh-fourier", action="store_true",
                        help="replace every Fourier gate by a beamsplitter mesh")
    common.add_argument("--scheme", choices=("rectangular", "butterfly"))
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--in", dest="input", metavar="FILE")
    common.add_argument("--out", metavar="FILE")
    common.add_argument("--grid", metavar="FILE")

    parser = argparse.ArgumentParser(prog="oam-cyclic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("simulate", cmd_simulate, "apply a gate to an input state"),
        ("verify", cmd_verify, "verify gates against the cyclic oracle"),
        ("resources", cmd_resources, "tally optical resources"),
        ("synth", cmd_synth, "synthesize a Fourier beamsplitter mesh"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgumentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
