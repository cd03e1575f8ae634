"""Acceptance criteria, one test per criterion.

Each criterion is a plain function returning ``(ok, detail)`` so the module can
also be run directly (``python3 tests/test_acceptance.py``) to print the
pass/fail table without pytest.
"""

from __future__ import annotations

import functools
import itertools
import math
import sys
import tempfile
import time
from collections import Counter
from pathlib import Path

import numpy as np
from scipy.stats import unitary_group

from oam_cyclic import (
    CodingSubspace,
    apply_network,
    basis_state,
    build_gate,
    build_michelson,
    build_sorter,
    build_xd,
    build_xdp,
    butterfly_fourier,
    decompose_rectangular,
    fidelity,
    fourier_matrix,
    mesh_matrix,
    mesh_unitary,
    minimal_window,
    network_matrix,
    substitute_fourier,
    tally_resources,
    verify_gate,
)
from oam_cyclic.cli import main as cli_main
from oam_cyclic.matrices import phase_aligned_residual

TOL = 1e-10
GRID = list(
    itertools.product(range(2, 9), (1, 2, 3), range(-5, 6), ("a", "b"), ("mz", "michelson"))
)

RESULTS: list[str] = []


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title} -- {detail}"
    RESULTS.append(line)
    print(line, flush=True)


@functools.lru_cache(maxsize=None)
def grid_sweep():
    t0 = time.perf_counter()
    reports = [
        verify_gate(build_gate(d, p, ell0, v, c), CodingSubspace(d, p, ell0), 100, TOL, seed=0)
        for d, p, ell0, v, c in GRID
    ]
    return reports, time.perf_counter() - t0


def criterion_1():
    t0 = time.perf_counter()
    worst = 1.0
    for d in range(2, 11):
        net = build_xd(d)
        for j in range(d):
            out = apply_network(net, basis_state(j, 0, d))
            worst = min(worst, fidelity(out, basis_state((j + 1) % d, 0, d)))
    dt = time.perf_counter() - t0
    ok = worst >= 1 - TOL and dt < 1.0
    return ok, f"min fidelity {worst:.16f}, {dt:.3f} s (limit 1 s)"


def criterion_2():
    reports, dt = grid_sweep()
    n_pass = sum(r.passed for r in reports)
    ok = n_pass == len(reports) and dt < 60.0
    return ok, f"{n_pass}/{len(reports)} grid points passed, sweep {dt:.1f} s (limit 60 s)"


def criterion_3():
    reports, _ = grid_sweep()
    worst = max(r.coherence_residual for r in reports)
    return worst <= TOL, f"max componentwise residual {worst:.2e} over {len(reports)} points"


def criterion_4():
    reports, _ = grid_sweep()
    worst = min(r.decoupling_min for r in reports)
    return worst >= 1 - TOL, f"min mode-0 probability {worst:.16f}"


def criterion_5():
    worst = 1.0
    for d in range(2, 9):
        net = build_sorter(d)
        for i in range(-2 * d, 2 * d + 1):
            for j in range(d):
                out = apply_network(net, basis_state(i, j, d))
                worst = min(worst, fidelity(out, basis_state(i, (j + i) % d, d)))
    return worst >= 1 - 1e-12, f"min fidelity {worst:.16f}"


def criterion_6():
    worst = 0.0
    pairs = sorted({(d, p, ell0, v) for d, p, ell0, v, _ in GRID})
    for d, p, ell0, v in pairs:
        mz = build_xdp(d, p, ell0, v)
        labels = minimal_window(mz)
        resid = phase_aligned_residual(
            network_matrix(mz, labels), network_matrix(build_michelson(d, p, ell0, v), labels)
        )
        worst = max(worst, resid)
    return worst <= TOL, f"max residual {worst:.2e} over {len(pairs)} MZ/Michelson pairs"


def criterion_7():
    bad = []
    for d in range(2, 11):
        t = tally_resources(build_xd(d))
        if not (
            t.spp_count == 2
            and Counter(t.spp_list) == Counter([1, -d])
            and t.fourier_count == 4
            and t.dove_phase_count == 2 * (d - 1)
        ):
            bad.append(f"xd d={d}")
    for d, p, ell0, v, c in GRID:
        if c != "michelson":
            continue
        t = tally_resources(build_michelson(d, p, ell0, v))
        k = ell0 % d
        expect = 3 if v == "b" and k else 2
        if t.sorter_count != 1 or t.spp_count != expect:
            bad.append(f"michelson {d},{p},{ell0},{v}")
    return not bad, "all tallies exact" if not bad else f"mismatches: {bad[:5]}"


def criterion_8():
    t0 = time.perf_counter()
    problems = []
    worst_rect = 0.0
    rng = np.random.default_rng(8)
    for d in range(2, 13):
        for _ in range(50):
            u = unitary_group.rvs(d, random_state=rng)
            mesh = decompose_rectangular(u)
            worst_rect = max(worst_rect, float(np.max(np.abs(mesh_matrix(mesh) - u))))
            if mesh.beamsplitter_count != d * (d - 1) // 2:
                problems.append(f"rect count d={d}")
    worst_bf = 0.0
    for d in (2, 4, 8, 16):
        mesh = butterfly_fourier(d)
        if mesh.beamsplitter_count != (d // 2) * int(math.log2(d)):
            problems.append(f"butterfly count d={d}")
        worst_bf = max(worst_bf, float(np.max(np.abs(mesh_unitary(mesh) - fourier_matrix(d)))))
    for d in (2, 4, 8):
        r = verify_gate(substitute_fourier(build_xd(d), "butterfly"), CodingSubspace(d), 100, 1e-9)
        if not r.passed:
            problems.append(f"substituted xd d={d}")
    dt = time.perf_counter() - t0
    ok = not problems and worst_rect <= 1e-9 and worst_bf <= 1e-9 and dt < 30.0
    return ok, (
        f"rect max error {worst_rect:.2e}, butterfly max error {worst_bf:.2e}, "
        f"{dt:.1f} s (limit 30 s)" + (f", problems: {problems}" if problems else "")
    )


def criterion_9():
    survivors = []
    total = 0
    for d in (2, 3, 4):
        net = build_xd(d)
        for i in range(len(net)):
            total += 1
            if verify_gate(net.without(i), CodingSubspace(d), 100, TOL).passed:
                survivors.append((d, i, type(net.sequence[i]).__name__))
    return not survivors, f"{total - len(survivors)}/{total} single deletions detected" + (
        f", undetected: {survivors}" if survivors else ""
    )


def criterion_10():
    with tempfile.TemporaryDirectory() as tmp:
        grid = Path(tmp) / "grid.json"
        grid.write_text('{"d": [2, 3, 5], "p": [1, 3], "ell0": [-2, 0, 4]}', encoding="utf-8")
        outs = []
        for name in ("one.jsonl", "two.jsonl"):
            out = Path(tmp) / name
            code = cli_main(["verify", "--grid", str(grid), "--seed", "7", "--out", str(out)])
            outs.append((code, out.read_bytes()))
    ok = outs[0][1] == outs[1][1] and outs[0][0] == outs[1][0] == 0
    return ok, f"report files identical: {outs[0][1] == outs[1][1]} ({len(outs[0][1])} bytes)"


CRITERIA = [
    (1, "cyclic correctness of X_d, d 2..10", criterion_1),
    (2, "generalized gate grid passes verification", criterion_2),
    (3, "coherence preserved up to global phase", criterion_3),
    (4, "ancilla returns to mode 0", criterion_4),
    (5, "sorter routes |i,j> to |i, j+i mod d>", criterion_5),
    (6, "Michelson equals Mach-Zehnder", criterion_6),
    (7, "resource tallies", criterion_7),
    (8, "mesh synthesis and substitution", criterion_8),
    (9, "single-deletion mutants fail", criterion_9),
    (10, "verify reports are byte-identical across runs", criterion_10),
]


def _run(n: int):
    _, title, func = CRITERIA[n - 1]
    ok, detail = func()
    record(n, title, ok, detail)
    assert ok, detail


def test_criterion_01_cyclic_correctness():
    _run(1)


def test_criterion_02_generalized_grid():
    _run(2)


def test_criterion_03_coherence():
    _run(3)


def test_criterion_04_ancilla_decoupling():
    _run(4)


def test_criterion_05_sorter_law():
    _run(5)


def test_criterion_06_folding_equivalence():
    _run(6)


def test_criterion_07_resource_counts():
    _run(7)


def test_criterion_08_mesh_synthesis():
    _run(8)


def test_criterion_09_mutation_sensitivity():
    _run(9)


def test_criterion_10_determinism():
    _run(10)


if __name__ == "__main__":
    failures = 0
    for n, title, func in CRITERIA:
        ok, detail = func()
        record(n, title, ok, detail)
        failures += not ok
    sys.exit(1 if failures else 0)
