"""Primitive optical elements and their exact action on sparse photon states.

Every element is an immutable dataclass exposing ``apply(state)`` and
``adjoint()``. Conventions:

* ``omega = exp(2*pi*i/d)``.
* Mode Fourier gate: ``F|j> = d**-0.5 * sum_k omega**(j*k) |k>``; the inverse
  uses ``omega**(-j*k)``.
* Beamsplitter on modes ``(a, b)``: ``[[cos t, -exp(-i phi) sin t],
  [exp(i phi) sin t, cos t]]`` with rows as outputs and columns as inputs.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import InvalidArgumentError
from .state import PRUNE_THRESHOLD, BasisLabel, PhotonState

TWO_PI = 2.0 * math.pi


def root_phase(num: int, den: int) -> complex:
    """``exp(2*pi*i*num/den)`` with the exponent reduced exactly mod 1."""
    r = num % den
    return cmath.exp(2j * math.pi * r / den)


def _wrap_angle(phi: float) -> float:
    phi = math.fmod(float(phi), TWO_PI)
    if phi < 0:
        phi += TWO_PI
    # fmod can return TWO_PI - tiny which rounds back up
    return 0.0 if phi >= TWO_PI else phi


def _check_mode(mode: int, d: int, what: str) -> None:
    if not 0 <= mode < d:
        raise InvalidArgumentError(f"{what}: mode {mode} outside [0, {d})")


def _by_oam(state: PhotonState, d: int) -> tuple[list[int], np.ndarray]:
    """Rows of mode amplitudes, one row per distinct OAM value."""
    row: dict[int, int] = {}
    rows = [row.setdefault(ell, len(row)) for ell, _ in state.amplitudes]
    modes = [m for _, m in state.amplitudes]
    block = np.zeros((len(row), d), dtype=complex)
    block[rows, modes] = np.fromiter(
        state.amplitudes.values(), dtype=complex, count=len(rows)
    )
    return list(row), block


def _from_block(ells: list[int], block: np.ndarray, d: int) -> PhotonState:
    rows, modes = np.nonzero(np.abs(block) >= PRUNE_THRESHOLD)
    vals = block[rows, modes].tolist()
    label = BasisLabel._make
    amps = {
        label((ells[r], m)): a for r, m, a in zip(rows.tolist(), modes.tolist(), vals)
    }
    return PhotonState._trusted(d, amps)


@functools.lru_cache(maxsize=64)
def _fft_kernel(d: int, inverse: bool) -> np.ndarray:
    # Transposed transform matrix obtained from numpy's FFT, acting on row vectors.
    # Kept separate from fourier_matrix so the matrix oracle stays independent.
    transform = np.fft.fft if inverse else np.fft.ifft
    return transform(np.eye(d), axis=0, norm="ortho").T.copy()


@dataclass(frozen=True)
class Spp:
    """Spiral phase plate of order ``n``; optionally restricted to one mode."""

    n: int
    control_mode: Optional[int] = None

    def check(self, d: int) -> None:
        if self.control_mode is not None:
            _check_mode(self.control_mode, d, "Spp")

    def apply(self, state: PhotonState) -> PhotonState:
        self.check(state.mode_count)
        amps = {}
        for (ell, mode), amp in state.amplitudes.items():
            if self.control_mode is None or mode == self.control_mode:
                ell += self.n
            amps[BasisLabel(ell, mode)] = amp
        return PhotonState._trusted(state.mode_count, amps)

    def adjoint(self) -> Spp:
        return Spp(-self.n, self.control_mode)

    def modes(self) -> tuple[int, ...]:
        return () if self.control_mode is None else (self.control_mode,)


@dataclass(frozen=True)
class DovePhase:
    """``omega**(ell*power)`` on OAM value ``ell`` (``Z_d`` for power 1)."""

    d: int
    power: Fraction = Fraction(1)

    def __post_init__(self):
        if self.d < 1:
            raise InvalidArgumentError(f"DovePhase: d must be positive, got {self.d}")
        object.__setattr__(self, "power", Fraction(self.power))

    def phase(self, ell: int) -> complex:
        q = self.power
        return root_phase(ell * q.numerator, q.denominator * self.d)

    def check(self, d: int) -> None:
        pass

    def apply(self, state: PhotonState) -> PhotonState:
        return PhotonState._trusted(
            state.mode_count,
            {k: self.phase(k.ell) * a for k, a in state.amplitudes.items()},
        )

    def adjoint(self) -> DovePhase:
        return DovePhase(self.d, -self.power)

    def modes(self) -> tuple[int, ...]:
        return ()


@dataclass(frozen=True)
class ModeFourier:
    """``d``-mode discrete Fourier transform on the spatial-mode register."""

    d: int
    inverse: bool = False

    def check(self, d: int) -> None:
        if d != self.d:
            raise InvalidArgumentError(f"ModeFourier(d={self.d}) applied to {d} modes")

    def apply(self, state: PhotonState) -> PhotonState:
        self.check(state.mode_count)
        ells, block = _by_oam(state, self.d)
        return _from_block(ells, block @ _fft_kernel(self.d, self.inverse), self.d)

    def adjoint(self) -> ModeFourier:
        return ModeFourier(self.d, not self.inverse)

    def modes(self) -> tuple[int, ...]:
        return tuple(range(self.d))


@dataclass(frozen=True)
class SorterPhases:
    """Path-dependent phases inside a sorter interferometer.

    Arm ``m`` applies ``exp(sign * 2*pi*i * m * (ell + offset*(p-1)) / (p*d))``
    to OAM value ``ell``. With ``offset = 0`` or ``p = 1`` this is the plain
    ``Z_d**(m/p)`` pattern; a nonzero offset adds an ell-independent phase per
    arm so that the lattice ``offset + p*Z`` sorts onto single modes with
    ``offset`` itself exiting on mode ``offset mod d``.
    """

    d: int
    p: int = 1
    offset: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.d < 1 or self.p < 1:
            raise InvalidArgumentError(f"SorterPhases: bad d={self.d} or p={self.p}")
        if self.sign not in (1, -1):
            raise InvalidArgumentError("SorterPhases: sign must be +1 or -1")

    def phase(self, ell: int, mode: int) -> complex:
        num = self.sign * mode * (ell + self.offset * (self.p - 1))
        return root_phase(num, self.p * self.d)

    def check(self, d: int) -> None:
        if d != self.d:
            raise InvalidArgumentError(f"SorterPhases(d={self.d}) applied to {d} modes")

    def apply(self, state: PhotonState) -> PhotonState:
        self.check(state.mode_count)
        if not state.amplitudes:
            return state
        keys = list(state.amplitudes)
        ells, modes = np.array(keys, dtype=np.int64).T
        den = self.p * self.d
        num = (self.sign * modes * (ells + self.offset * (self.p - 1))) % den
        amps = np.fromiter(state.amplitudes.values(), dtype=complex, count=len(keys))
        amps *= np.exp(2j * np.pi * num / den)
        return PhotonState._trusted(state.mode_count, dict(zip(keys, amps.tolist())))

    def adjoint(self) -> SorterPhases:
        return SorterPhases(self.d, self.p, self.offset, -self.sign)

    def modes(self) -> tuple[int, ...]:
        return tuple(range(self.d))


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise InvalidArgumentError("BeamSplitter needs two distinct modes")
        theta = float(self.theta)
        if not -1e-12 <= theta <= math.pi / 2 + 1e-12:
            raise InvalidArgumentError(f"BeamSplitter: theta={theta} outside [0, pi/2]")
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi / 2))
        object.__setattr__(self, "phi", _wrap_angle(self.phi))

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = cmath.exp(1j * self.phi)
        return np.array([[c, -s / e], [e * s, c]], dtype=complex)

    def check(self, d: int) -> None:
        _check_mode(self.mode_a, d, "BeamSplitter")
        _check_mode(self.mode_b, d, "BeamSplitter")

    def apply(self, state: PhotonState) -> PhotonState:
        d = state.mode_count
        self.check(d)
        u = self.matrix()
        ells, block = _by_oam(state, d)
        cols = [self.mode_a, self.mode_b]
        block[:, cols] = block[:, cols] @ u.T
        return _from_block(ells, block, d)

    def adjoint(self) -> BeamSplitter:
        # T(theta, phi)^dagger == T(theta, phi + pi)
        return BeamSplitter(self.mode_a, self.mode_b, self.theta, self.phi + math.pi)

    def modes(self) -> tuple[int, ...]:
        return (self.mode_a, self.mode_b)


@dataclass(frozen=True)
class ModePhase:
    mode: int
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _wrap_angle(self.phi))

    def check(self, d: int) -> None:
        _check_mode(self.mode, d, "ModePhase")

    def apply(self, state: PhotonState) -> PhotonState:
        self.check(state.mode_count)
        factor = cmath.exp(1j * self.phi)
        return PhotonState(
            state.mode_count,
            {k: (factor * a if k.mode == self.mode else a) for k, a in state.amplitudes.items()},
        )

    def adjoint(self) -> ModePhase:
        return ModePhase(self.mode, -self.phi)

    def modes(self) -> tuple[int, ...]:
        return (self.mode,)


@dataclass(frozen=True)
class ModePermutation:
    """Passive waveguide relabelling ``|ell, m> -> |ell, perm[m]>``."""

    perm: tuple[int, ...] = field(default=())

    def __post_init__(self):
        perm = tuple(int(x) for x in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise InvalidArgumentError(f"not a permutation: {perm}")
        object.__setattr__(self, "perm", perm)

    def check(self, d: int) -> None:
        if len(self.perm) != d:
            raise InvalidArgumentError(f"ModePermutation of size {len(self.perm)} on {d} modes")

    def apply(self, state: PhotonState) -> PhotonState:
        self.check(state.mode_count)
        return PhotonState(
            state.mode_count,
            {BasisLabel(k.ell, self.perm[k.mode]): a for k, a in state.amplitudes.items()},
        )

    def adjoint(self) -> ModePermutation:
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return ModePermutation(tuple(inv))

    def modes(self) -> tuple[int, ...]:
        return tuple(range(len(self.perm)))


@dataclass(frozen=True)
class RetroReflector:
    """Double reflection back into ``mode``; net identity on the state."""

    mode: int

    def check(self, d: int) -> None:
        _check_mode(self.mode, d, "RetroReflector")

    def apply(self, state: PhotonState) -> PhotonState:
        self.check(state.mode_count)
        return state

    def adjoint(self) -> RetroReflector:
        return self

    def modes(self) -> tuple[int, ...]:
        return (self.mode,)


@dataclass(frozen=True)
class Circulator:
    """Separates the Michelson output port from its input; identity unitary."""

    def check(self, d: int) -> None:
        pass

    def apply(self, state: PhotonState) -> PhotonState:
        return state

    def adjoint(self) -> Circulator:
        return self

    def modes(self) -> tuple[int, ...]:
        return ()


Element = Union[
    Spp,
    DovePhase,
    ModeFourier,
    SorterPhases,
    BeamSplitter,
    ModePhase,
    ModePermutation,
    RetroReflector,
    Circulator,
]

ELEMENT_TYPES = {
    cls.__name__: cls
    for cls in (
        Spp,
        DovePhase,
        ModeFourier,
        SorterPhases,
        BeamSplitter,
        ModePhase,
        ModePermutation,
        RetroReflector,
        Circulator,
    )
}


def apply(e: Element, s: PhotonState) -> PhotonState:
    return e.apply(s)


def adjoint(e: Element) -> Element:
    return e.adjoint()


def fourier_matrix(d: int, inverse: bool = False) -> np.ndarray:
    """Dense ``d x d`` mode-Fourier matrix built from the kernel formula."""
    return _fourier_matrix(d, bool(inverse)).copy()


@functools.lru_cache(maxsize=64)
def _fourier_matrix(d: int, inverse: bool) -> np.ndarray:
    sign = -1 if inverse else 1
    jk = np.outer(np.arange(d), np.arange(d)) % d
    return np.exp(sign * 2j * np.pi * jk / d) / math.sqrt(d)


def same_element(a: Element, b: Element, tol: float = 1e-12) -> bool:
    """Equality with float parameters compared as angles within ``tol``."""
    if type(a) is not type(b):
        return False
    for name in a.__dataclass_fields__:
        x, y = getattr(a, name), getattr(b, name)
        if isinstance(x, float) or isinstance(y, float):
            diff = math.fmod(abs(float(x) - float(y)), TWO_PI)
            if min(diff, TWO_PI - diff) > tol:
                return False
        elif x != y:
            return False
    return True
