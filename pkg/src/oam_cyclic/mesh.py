"""Beamsplitter / phase-shifter meshes for d-mode unitaries.

Two constructions:

* :func:`decompose_rectangular` -- rectangular (Clements-style) nulling for any
  unitary, exactly ``d(d-1)/2`` beamsplitters.
* :func:`butterfly_fourier` -- radix-2 decimation-in-time Fourier mesh for
  ``d = 2**q``, exactly ``(d/2) log2 d`` beamsplitters. Its input is
  bit-reversed; the permutation is recorded, not built from crossings.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .elements import (
    BeamSplitter,
    Element,
    ModeFourier,
    ModePermutation,
    ModePhase,
    fourier_matrix,
)
from .errors import InvalidArgumentError
from .networks import Network

MeshLayer = Union[BeamSplitter, ModePhase]


@dataclass(frozen=True)
class Mesh:
    d: int
    layers: tuple[MeshLayer, ...] = ()
    output_phases: tuple[float, ...] = ()
    scheme: str = "rectangular"
    # mesh input port i is fed by logical mode input_permutation[i]
    input_permutation: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        phases = tuple(float(x) for x in self.output_phases) or (0.0,) * self.d
        if len(phases) != self.d:
            raise InvalidArgumentError(f"need {self.d} output phases, got {len(phases)}")
        object.__setattr__(self, "output_phases", phases)
        if self.input_permutation is not None:
            perm = tuple(int(x) for x in self.input_permutation)
            if sorted(perm) != list(range(self.d)):
                raise InvalidArgumentError(f"bad input permutation {perm}")
            object.__setattr__(self, "input_permutation", perm)
        for layer in self.layers:
            layer.check(self.d)

    @property
    def beamsplitter_count(self) -> int:
        return sum(isinstance(x, BeamSplitter) for x in self.layers)

    @property
    def phase_shifter_count(self) -> int:
        """Internal ModePhase layers plus output phases that are not trivially zero."""
        internal = sum(isinstance(x, ModePhase) for x in self.layers)
        return internal + sum(1 for x in self.output_phases if x != 0.0)


def _embed(u2: np.ndarray, a: int, b: int, d: int) -> np.ndarray:
    m = np.eye(d, dtype=complex)
    m[np.ix_([a, b], [a, b])] = u2
    return m


def layer_matrix(layer: MeshLayer, d: int) -> np.ndarray:
    if isinstance(layer, BeamSplitter):
        return _embed(layer.matrix(), layer.mode_a, layer.mode_b, d)
    m = np.eye(d, dtype=complex)
    m[layer.mode, layer.mode] = cmath.exp(1j * layer.phi)
    return m


def mesh_matrix(mesh: Mesh) -> np.ndarray:
    """Raw mesh unitary ``diag(exp(i out)) @ L_n @ ... @ L_1`` (port order)."""
    u = np.eye(mesh.d, dtype=complex)
    for layer in mesh.layers:
        u = layer_matrix(layer, mesh.d) @ u
    return np.diag(np.exp(1j * np.asarray(mesh.output_phases))) @ u


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """``P`` with ``(P x)[i] = x[perm[i]]``."""
    d = len(perm)
    p = np.zeros((d, d))
    p[np.arange(d), list(perm)] = 1.0
    return p


def mesh_unitary(mesh: Mesh) -> np.ndarray:
    """Mesh unitary on logical modes, including the recorded input permutation."""
    u = mesh_matrix(mesh)
    if mesh.input_permutation is not None:
        u = u @ permutation_matrix(mesh.input_permutation)
    return u


def _null_right(u: np.ndarray, row: int, a: int) -> BeamSplitter:
    """Beamsplitter on columns (a, a+1) whose inverse from the right zeroes u[row, a]."""
    x, y = u[row, a], u[row, a + 1]
    theta = math.atan2(abs(x), abs(y))
    phi = cmath.phase(x) - cmath.phase(y) if abs(x) > 0 and abs(y) > 0 else 0.0
    return BeamSplitter(a, a + 1, theta, phi)


def _null_left(u: np.ndarray, a: int, col: int) -> BeamSplitter:
    """Beamsplitter on rows (a, a+1) that from the left zeroes u[a+1, col]."""
    x, y = u[a, col], u[a + 1, col]
    theta = math.atan2(abs(y), abs(x))
    phi = math.pi + cmath.phase(y) - cmath.phase(x) if abs(x) > 0 and abs(y) > 0 else 0.0
    return BeamSplitter(a, a + 1, theta, phi)


def decompose_rectangular(u: np.ndarray, tol: float = 1e-8) -> Mesh:
    """Rectangular mesh reproducing the unitary ``u``.

    Alternating diagonals are nulled from the right (``T^-1`` on columns) and
    from the left (``T`` on rows). The left factors are then pushed through the
    residual diagonal using ``T(t, phi)^dagger D = D T(t, alpha - beta + phi + pi)``.
    Already-zero targets still emit a ``theta = 0`` beamsplitter.
    """
    u = np.array(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {u.shape}")
    d = u.shape[0]
    resid = float(np.max(np.abs(u.conj().T @ u - np.eye(d)), initial=0.0))
    if resid > tol:
        raise InvalidArgumentError(f"matrix is not unitary: residual max|U^dagger U - I| = {resid:.3e}")

    right: list[BeamSplitter] = []
    left: list[BeamSplitter] = []
    for i in range(d - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                bs = _null_right(u, d - 1 - j, i - j)
                u = u @ _embed(bs.adjoint().matrix(), bs.mode_a, bs.mode_b, d)
                right.append(bs)
        else:
            for j in range(1, i + 2):
                bs = _null_left(u, d + j - i - 3, j - 1)
                u = _embed(bs.matrix(), bs.mode_a, bs.mode_b, d) @ u
                left.append(bs)

    alphas = np.angle(np.diag(u))
    pushed = []
    for bs in reversed(left):
        a, b = alphas[bs.mode_a], alphas[bs.mode_b]
        pushed.append(BeamSplitter(bs.mode_a, bs.mode_b, bs.theta, a - b + bs.phi + math.pi))
    # u == D . pushed[-1] ... pushed[0] . right[-1] ... right[0]
    layers = right + pushed
    return Mesh(d, layers, tuple(float(x) for x in alphas), scheme="rectangular")


def _bit_reverse(i: int, bits: int) -> int:
    out = 0
    for _ in range(bits):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


def butterfly_fourier(d: int) -> Mesh:
    """Mode-Fourier mesh ``F[k, j] = omega**(j k) / sqrt(d)`` for ``d = 2**q``.

    Each butterfly is ``ModePhase(b, twiddle + pi)`` then a balanced
    ``BeamSplitter(a, b, pi/4, 0)``, giving ``((x + w y), (x - w y)) / sqrt 2``.
    """
    if not isinstance(d, (int, np.integer)) or d < 2 or d & (d - 1):
        raise InvalidArgumentError(f"d must be a power of two (d >= 2), got {d!r}")
    q = d.bit_length() - 1
    layers: list[MeshLayer] = []
    size = 2
    while size <= d:
        half = size // 2
        for start in range(0, d, size):
            for j in range(half):
                a, b = start + j, start + j + half
                twiddle = 2 * math.pi * j / size
                layers.append(ModePhase(b, twiddle + math.pi))
                layers.append(BeamSplitter(a, b, math.pi / 4, 0.0))
        size *= 2
    perm = tuple(_bit_reverse(i, q) for i in range(d))
    return Mesh(d, layers, (0.0,) * d, scheme="butterfly", input_permutation=perm)


def mesh_elements(mesh: Mesh, inverse: bool = False) -> list[Element]:
    """Element sequence realising ``mesh_unitary(mesh)`` (or its inverse) on modes."""
    seq: list[Element] = []
    if mesh.input_permutation is not None:
        # logical mode perm[i] must arrive at port i
        to_port = [0] * mesh.d
        for port, logical in enumerate(mesh.input_permutation):
            to_port[logical] = port
        seq.append(ModePermutation(tuple(to_port)))
    seq += list(mesh.layers)
    seq += [ModePhase(m, phi) for m, phi in enumerate(mesh.output_phases) if phi != 0.0]
    if inverse:
        seq = [e.adjoint() for e in reversed(seq)]
    return seq


def fourier_mesh(d: int, scheme: str = "butterfly") -> Mesh:
    if scheme == "butterfly":
        return butterfly_fourier(d)
    if scheme == "rectangular":
        return decompose_rectangular(fourier_matrix(d))
    raise InvalidArgumentError(f"unknown scheme {scheme!r}")


def substitute_fourier(net: Network, scheme: str = "butterfly") -> Network:
    """Replace each ModeFourier by its mesh; sorter and folding tags follow."""
    mesh = None
    new_seq: list[Element] = []
    spans: list[tuple[int, int]] = []
    for e in net.sequence:
        start = len(new_seq)
        if isinstance(e, ModeFourier):
            if mesh is None:
                mesh = fourier_mesh(net.d, scheme)
            new_seq += mesh_elements(mesh, inverse=e.inverse)
        else:
            new_seq.append(e)
        spans.append((start, len(new_seq)))

    folded = []
    for i, j in net.folded_reuse:
        (a0, a1), (b0, b1) = spans[i], spans[j]
        n = a1 - a0
        folded += [(a0 + t, b0 + n - 1 - t) for t in range(n)]
    sorters = tuple((spans[a][0], spans[b - 1][1]) for a, b in net.sorters)
    return replace(net, sequence=tuple(new_seq), folded_reuse=tuple(folded), sorters=sorters)
