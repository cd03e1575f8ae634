"""Sparse photon states on the OAM x spatial-mode space.

A single photon carries an unbounded integer OAM value ``ell`` and sits in
one of ``d`` spatial modes. States are stored as a finite mapping from
``(ell, mode)`` labels to complex amplitudes, so no OAM truncation window is
ever needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import InvalidArgumentError

PRUNE_THRESHOLD = 1e-14
NORM_TOL = 1e-12


class BasisLabel(NamedTuple):
    """One basis ket ``|ell>_OAM |mode>_m``."""

    ell: int
    mode: int


@dataclass(frozen=True)
class PhotonState:
    """Immutable sparse superposition of basis labels."""

    mode_count: int
    amplitudes: Mapping[BasisLabel, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode_count < 1:
            raise InvalidArgumentError(f"mode_count must be positive, got {self.mode_count}")
        amps = {}
        for key, amp in self.amplitudes.items():
            label = BasisLabel(int(key[0]), int(key[1]))
            if not 0 <= label.mode < self.mode_count:
                raise InvalidArgumentError(
                    f"mode {label.mode} outside [0, {self.mode_count})"
                )
            amps[label] = complex(amp)
        object.__setattr__(self, "amplitudes", MappingProxyType(amps))

    @classmethod
    def _trusted(cls, mode_count: int, amps: dict) -> PhotonState:
        # skips validation; callers guarantee BasisLabel keys in range
        obj = object.__new__(cls)
        object.__setattr__(obj, "mode_count", mode_count)
        object.__setattr__(obj, "amplitudes", MappingProxyType(amps))
        return obj

    @classmethod
    def from_entries(
        cls, mode_count: int, entries: Iterable[tuple[int, int, complex]]
    ) -> PhotonState:
        """Build a state from ``(ell, mode, amplitude)`` triples, summing repeats."""
        amps: dict[BasisLabel, complex] = {}
        for ell, mode, amp in entries:
            label = BasisLabel(int(ell), int(mode))
            amps[label] = amps.get(label, 0j) + complex(amp)
        return cls(mode_count, amps)

    def __getitem__(self, label: tuple[int, int]) -> complex:
        return self.amplitudes.get(BasisLabel(*label), 0j)

    def __len__(self) -> int:
        return len(self.amplitudes)

    def __iter__(self):
        return iter(self.amplitudes)

    def items(self):
        return self.amplitudes.items()

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalized(self) -> PhotonState:
        n = self.norm()
        if n == 0.0:
            raise InvalidArgumentError("cannot normalize the zero state")
        return PhotonState(self.mode_count, {k: a / n for k, a in self.amplitudes.items()})

    def pruned(self, threshold: float = PRUNE_THRESHOLD) -> PhotonState:
        return PhotonState(
            self.mode_count,
            {k: a for k, a in self.amplitudes.items() if abs(a) >= threshold},
        )

    def scaled(self, c: complex) -> PhotonState:
        return PhotonState(self.mode_count, {k: c * a for k, a in self.amplitudes.items()})

    def sorted_entries(self) -> list[tuple[int, int, complex]]:
        """Nonzero amplitudes ordered lexicographically by ``(ell, mode)``."""
        return [(k.ell, k.mode, a) for k, a in sorted(self.amplitudes.items())]

    def oam_values(self) -> set[int]:
        return {k.ell for k in self.amplitudes}

    def dominant(self) -> tuple[BasisLabel, complex]:
        """Largest-magnitude component; ties broken by label order."""
        if not self.amplitudes:
            raise InvalidArgumentError("zero state has no dominant component")
        return max(sorted(self.amplitudes.items()), key=lambda kv: abs(kv[1]))

    def __repr__(self) -> str:
        body = ", ".join(f"({e},{m}): {a:.6g}" for e, m, a in self.sorted_entries())
        return f"PhotonState(d={self.mode_count}, {{{body}}})"


def basis_state(ell: int, mode: int, d: int) -> PhotonState:
    if not 0 <= mode < d:
        raise InvalidArgumentError(f"mode {mode} outside [0, {d})")
    return PhotonState(d, {BasisLabel(ell, mode): 1.0 + 0j})


def _check_same_space(a: PhotonState, b: PhotonState) -> None:
    if a.mode_count != b.mode_count:
        raise InvalidArgumentError(
            f"mode-count mismatch: {a.mode_count} vs {b.mode_count}"
        )


def inner_product(a: PhotonState, b: PhotonState) -> complex:
    """Return ``<a|b>``, antilinear in ``a``."""
    _check_same_space(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for label in small.amplitudes:
        if label in large.amplitudes:
            total += a.amplitudes[label].conjugate() * b.amplitudes[label]
    return total


def fidelity(a: PhotonState, b: PhotonState) -> float:
    f = abs(inner_product(a, b)) ** 2
    return min(1.0, max(0.0, f))


def mode_marginal(s: PhotonState) -> np.ndarray:
    """Probability of finding the photon in each spatial mode."""
    probs = np.zeros(s.mode_count)
    for label, amp in s.amplitudes.items():
        probs[label.mode] += abs(amp) ** 2
    return probs


@dataclass(frozen=True)
class CodingSubspace:
    """The ``d`` equally spaced OAM values ``ell0 + j*p`` a cyclic gate permutes."""

    d: int
    p: int = 1
    ell0: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise InvalidArgumentError(f"d must be positive, got {self.d}")
        if self.p < 1:
            raise InvalidArgumentError(f"p must be a positive integer, got {self.p}")

    @property
    def k(self) -> int:
        # Python's % is already the nonnegative mathematical mod for d > 0.
        return self.ell0 % self.d

    def values(self) -> list[int]:
        return [self.ell0 + j * self.p for j in range(self.d)]

    def __contains__(self, ell: int) -> bool:
        offset = ell - self.ell0
        return offset % self.p == 0 and 0 <= offset // self.p < self.d
