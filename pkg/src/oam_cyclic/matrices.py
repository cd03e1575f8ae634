"""Dense/sparse matrix oracle for elements on a finite basis window.

This path builds each element's matrix column by column from its defining
formula. It never calls ``Element.apply``, so comparing the two routes is a
genuine cross-check.

Basis ordering is lexicographic: ``ell`` ascending, then ``mode``.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .elements import (
    BeamSplitter,
    Circulator,
    DovePhase,
    Element,
    ModeFourier,
    ModePermutation,
    ModePhase,
    RetroReflector,
    SorterPhases,
    Spp,
    _fourier_matrix,
)
from .errors import InvalidArgumentError, WindowEscapeError
from .state import BasisLabel

WindowLike = Union[range, tuple, Iterable[tuple[int, int]]]


def window_labels(window: WindowLike, d: int) -> list[BasisLabel]:
    """Expand a window into its sorted basis labels.

    ``window`` is either an inclusive OAM interval ``(lo, hi)`` or a ``range``
    (both meaning every mode), or an explicit iterable of ``(ell, mode)``.
    """
    if isinstance(window, range):
        ells = list(window)
        return [BasisLabel(e, m) for e in ells for m in range(d)]
    items = list(window)
    if len(items) == 2 and all(isinstance(x, (int, np.integer)) for x in items):
        lo, hi = int(items[0]), int(items[1])
        if lo > hi:
            raise InvalidArgumentError(f"empty OAM interval [{lo}, {hi}]")
        return [BasisLabel(e, m) for e in range(lo, hi + 1) for m in range(d)]
    labels = sorted({BasisLabel(int(e), int(m)) for e, m in items})
    for lab in labels:
        if not 0 <= lab.mode < d:
            raise InvalidArgumentError(f"window label {tuple(lab)} has mode outside [0, {d})")
    return labels


def _column(e: Element, ell: int, mode: int, d: int) -> list[tuple[int, int, complex]]:
    if isinstance(e, Spp):
        if e.control_mode is None or e.control_mode == mode:
            return [(ell + e.n, mode, 1.0)]
        return [(ell, mode, 1.0)]
    if isinstance(e, DovePhase):
        x = float(e.power) * ell / e.d
        return [(ell, mode, cmath.exp(2j * math.pi * x))]
    if isinstance(e, SorterPhases):
        x = e.sign * mode * (ell + e.offset * (e.p - 1)) / (e.p * e.d)
        return [(ell, mode, cmath.exp(2j * math.pi * x))]
    if isinstance(e, ModeFourier):
        col = _fourier_matrix(e.d, e.inverse)[:, mode]
        return [(ell, k, complex(col[k])) for k in range(e.d)]
    if isinstance(e, BeamSplitter):
        u = e.matrix()
        if mode == e.mode_a:
            return [(ell, e.mode_a, u[0, 0]), (ell, e.mode_b, u[1, 0])]
        if mode == e.mode_b:
            return [(ell, e.mode_a, u[0, 1]), (ell, e.mode_b, u[1, 1])]
        return [(ell, mode, 1.0)]
    if isinstance(e, ModePhase):
        return [(ell, mode, cmath.exp(1j * e.phi) if mode == e.mode else 1.0)]
    if isinstance(e, ModePermutation):
        return [(ell, e.perm[mode], 1.0)]
    if isinstance(e, (RetroReflector, Circulator)):
        return [(ell, mode, 1.0)]
    raise TypeError(f"unknown element {e!r}")


def element_operator(
    e: Element, labels: Sequence[BasisLabel], d: int, truncate: bool = False
) -> sp.csr_matrix:
    """Sparse matrix of ``e`` on ``labels``.

    With ``truncate=True`` amplitude leaving the window is dropped (a partial
    isometry) instead of raising :class:`WindowEscapeError`.
    """
    e.check(d)
    index = {lab: i for i, lab in enumerate(labels)}
    rows, cols, vals = [], [], []
    for j, (ell, mode) in enumerate(labels):
        for ell2, mode2, amp in _column(e, ell, mode, d):
            i = index.get((ell2, mode2))
            if i is None:
                if truncate:
                    continue
                raise WindowEscapeError(
                    f"{type(e).__name__} maps |{ell},{mode}> to |{ell2},{mode2}> outside the window"
                )
            rows.append(i)
            cols.append(j)
            vals.append(amp)
    n = len(labels)
    return sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=(n, n))


def element_matrix(e: Element, oam_window: WindowLike, d: int) -> np.ndarray:
    """Dense unitary of ``e`` on a window closed under its OAM shifts."""
    return element_operator(e, window_labels(oam_window, d), d).toarray()


def sequence_matrix(
    sequence: Sequence[Element],
    d: int,
    window: WindowLike,
    require_closed: bool = True,
    tol: float = 1e-10,
) -> np.ndarray:
    """Product of element matrices (application order) compressed to ``window``.

    Each step is a rectangular block from the structural support reached so
    far to the support of its image, so nothing is truncated along the way.
    If ``require_closed`` every window column must keep unit norm inside the
    window, otherwise :class:`WindowEscapeError`.
    """
    labels = window_labels(window, d)
    if not labels:
        return np.zeros((0, 0), dtype=complex)
    current = labels
    total = sp.identity(len(labels), dtype=complex, format="csr")
    for e in sequence:
        e.check(d)
        columns = [_column(e, ell, mode, d) for ell, mode in current]
        image = sorted({BasisLabel(ell2, m2) for col in columns for ell2, m2, _ in col})
        index = {lab: i for i, lab in enumerate(image)}
        rows, cols, vals = [], [], []
        for j, col in enumerate(columns):
            for ell2, m2, amp in col:
                rows.append(index[(ell2, m2)])
                cols.append(j)
                vals.append(amp)
        step = sp.csr_matrix(
            (np.asarray(vals, dtype=complex), (rows, cols)), shape=(len(image), len(current))
        )
        total = step @ total
        current = image
    pos = {lab: i for i, lab in enumerate(current)}
    out = np.zeros((len(labels), len(labels)), dtype=complex)
    dense = total.toarray()
    for i, lab in enumerate(labels):
        r = pos.get(lab)
        if r is not None:
            out[i] = dense[r]
    if require_closed:
        norms = np.linalg.norm(out, axis=0)
        bad = np.flatnonzero(norms < 1.0 - tol)
        if bad.size:
            lab = labels[bad[0]]
            raise WindowEscapeError(
                f"window not closed: |{lab.ell},{lab.mode}> keeps only "
                f"{norms[bad[0]] ** 2:.3g} of its probability inside"
            )
    return out


def phase_aligned_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Max-entry distance between ``a`` and ``b`` after removing one global phase.

    The phase is fixed on the largest-magnitude entry of ``b``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    flat = np.argmax(np.abs(b))
    ref_a, ref_b = a.flat[flat], b.flat[flat]
    phase = 1.0 + 0j
    if abs(ref_a) > 0 and abs(ref_b) > 0:
        phase = (ref_b / abs(ref_b)) / (ref_a / abs(ref_a))
    return float(np.max(np.abs(a * phase - b)))


def unitarity_residual(m: np.ndarray) -> float:
    """``max |M^dagger M - I|``."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1])), initial=0.0))
