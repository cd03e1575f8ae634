import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from oam_cyclic import (
    BeamSplitter,
    Circulator,
    DovePhase,
    InvalidArgumentError,
    ModeFourier,
    ModePermutation,
    ModePhase,
    PhotonState,
    RetroReflector,
    SorterPhases,
    Spp,
    WindowEscapeError,
    adjoint,
    apply,
    basis_state,
    element_matrix,
    fidelity,
)
from oam_cyclic.matrices import element_operator, window_labels

from conftest import random_state

D = 4
ALL_KINDS = [
    Spp(3),
    Spp(-2, control_mode=1),
    DovePhase(D, 1),
    DovePhase(D, Fraction(2, 3)),
    ModeFourier(D),
    ModeFourier(D, inverse=True),
    SorterPhases(D, 1),
    SorterPhases(D, 3, offset=2),
    BeamSplitter(0, 2, 0.3, 1.1),
    ModePhase(3, 0.7),
    ModePermutation((2, 0, 3, 1)),
    RetroReflector(2),
    Circulator(),
]


def test_spp_shifts():
    assert dict(apply(Spp(2), basis_state(5, 0, 2)).amplitudes) == {(7, 0): 1}


def test_controlled_spp_ignores_other_modes():
    out = apply(Spp(-3, control_mode=0), basis_state(4, 1, 2))
    assert dict(out.amplitudes) == {(4, 1): 1}
    out = apply(Spp(-3, control_mode=0), basis_state(4, 0, 2))
    assert dict(out.amplitudes) == {(1, 0): 1}


def test_dove_phase_is_z_d():
    out = apply(DovePhase(4, 1), basis_state(3, 0, 1))
    assert out[(3, 0)] == pytest.approx(-1j, abs=1e-15)


def test_dove_phase_exact_for_large_oam():
    # exponent reduction keeps ell = 10010 exact
    out = apply(DovePhase(7, 1), basis_state(10010, 0, 1))
    assert out[(10010, 0)] == pytest.approx(cmath.exp(2j * math.pi * (10010 % 7) / 7), abs=1e-15)


def test_mode_fourier_d2():
    out = apply(ModeFourier(2), basis_state(0, 0, 2))
    r = 1 / math.sqrt(2)
    assert out[(0, 0)] == pytest.approx(r, abs=1e-15)
    assert out[(0, 1)] == pytest.approx(r, abs=1e-15)


def test_mode_fourier_sign_convention():
    d = 3
    out = apply(ModeFourier(d), basis_state(0, 1, d))
    for k in range(d):
        assert out[(0, k)] == pytest.approx(cmath.exp(2j * math.pi * k / d) / math.sqrt(d), abs=1e-15)


def test_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        apply(ModeFourier(3), basis_state(0, 0, 2))
    with pytest.raises(InvalidArgumentError):
        apply(SorterPhases(3), basis_state(0, 0, 2))
    with pytest.raises(InvalidArgumentError):
        apply(Spp(1, control_mode=2), basis_state(0, 0, 2))


def test_adjoint_examples():
    assert adjoint(Spp(5)) == Spp(-5)
    assert adjoint(ModeFourier(4)) == ModeFourier(4, inverse=True)
    assert adjoint(RetroReflector(2)) == RetroReflector(2)
    assert adjoint(Circulator()) == Circulator()
    assert adjoint(DovePhase(3, 1)) == DovePhase(3, -1)
    assert adjoint(SorterPhases(3, 2)).sign == -1


def test_beamsplitter_canonicalization():
    bs = BeamSplitter(0, 1, math.pi / 4, -math.pi / 2)
    assert 0 <= bs.phi < 2 * math.pi
    assert bs.phi == pytest.approx(3 * math.pi / 2)
    with pytest.raises(InvalidArgumentError):
        BeamSplitter(0, 1, 2.0)
    with pytest.raises(InvalidArgumentError):
        BeamSplitter(1, 1, 0.1)


def test_beamsplitter_convention():
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(
        BeamSplitter(0, 1, math.pi / 4, 0.0).matrix(), [[r, -r], [r, r]], atol=1e-15
    )


@pytest.mark.parametrize("e", ALL_KINDS, ids=lambda e: type(e).__name__)
def test_unitarity_and_round_trip(e, rng):
    for _ in range(100):
        s = random_state(rng, D)
        out = apply(e, s)
        assert abs(out.norm() - 1) <= 1e-12
        back = apply(adjoint(e), out)
        assert fidelity(back, s) >= 1 - 1e-12


def test_element_matrix_dove_diag():
    m = element_matrix(DovePhase(2, 1), (0, 1), 2)
    np.testing.assert_allclose(m, np.diag([1, 1, -1, -1]), atol=1e-15)


def test_element_matrix_window_escape():
    with pytest.raises(WindowEscapeError):
        element_matrix(Spp(1), (0, 1), 2)


def test_element_matrix_sorter_phase_entry():
    m = element_matrix(SorterPhases(2, 1), (0, 1), 2)
    # lexicographic order: (0,0) (0,1) (1,0) (1,1); oracle exp(2 pi i * 1 * 1 / 2)
    assert m[3, 3] == pytest.approx(cmath.exp(2j * math.pi * 1 * 1 / (1 * 2)), abs=1e-15)
    assert m[3, 3] == pytest.approx(-1, abs=1e-15)


CLOSED_WINDOW_KINDS = [e for e in ALL_KINDS if not isinstance(e, Spp)] + [Spp(0)]


def _apply_columns(e, labels):
    index = {lab: i for i, lab in enumerate(labels)}
    cols = np.zeros((len(labels), len(labels)), dtype=complex)
    for j, lab in enumerate(labels):
        for key, amp in apply(e, basis_state(lab.ell, lab.mode, D)).items():
            if key in index:
                cols[index[key], j] = amp
    return cols


@pytest.mark.parametrize("e", CLOSED_WINDOW_KINDS, ids=lambda e: type(e).__name__)
def test_matrix_matches_sparse_apply(e):
    window = (-3, 6)
    m = element_matrix(e, window, D)
    np.testing.assert_allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-12)
    np.testing.assert_allclose(m, _apply_columns(e, window_labels(window, D)), atol=1e-12)


@pytest.mark.parametrize("e", [Spp(3), Spp(-2, control_mode=1)], ids=str)
def test_shift_operator_matches_sparse_apply(e):
    # shifts never close a finite window; compare the truncated operator instead
    labels = window_labels((-3, 6), D)
    m = element_operator(e, labels, D, truncate=True).toarray()
    np.testing.assert_allclose(m, _apply_columns(e, labels), atol=1e-12)


def test_sorter_phases_equal_per_mode_dove():
    d, window = 5, (-4, 7)
    labels = window_labels(window, d)
    sorter = element_matrix(SorterPhases(d, 1), window, d)
    expected = np.zeros(len(labels), dtype=complex)
    for m in range(d):
        dove = element_matrix(DovePhase(d, m), window, d)
        for i, lab in enumerate(labels):
            if lab.mode == m:
                expected[i] = dove[i, i]
    np.testing.assert_allclose(sorter, np.diag(expected), atol=1e-12)


def test_mode_permutation_rejects_non_permutation():
    with pytest.raises(InvalidArgumentError):
        ModePermutation((0, 0, 1))


def test_states_are_pruned_after_fourier():
    s = apply(ModeFourier(4, inverse=True), apply(ModeFourier(4), basis_state(2, 3, 4)))
    assert list(s.amplitudes) == [(2, 3)]
