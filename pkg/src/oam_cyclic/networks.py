"""Cyclic-gate architectures assembled from primitive elements.

Each builder returns an immutable :class:`Network`: a flat element sequence
plus bookkeeping (which index ranges form a sorter, which Michelson elements
are the same physical device traversed twice).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .elements import (
    BeamSplitter,
    Circulator,
    DovePhase,
    Element,
    ModeFourier,
    ModePhase,
    RetroReflector,
    SorterPhases,
    Spp,
    same_element,
)
from .errors import InvalidArgumentError, WindowEscapeError
from .matrices import WindowLike, sequence_matrix
from .state import PRUNE_THRESHOLD, BasisLabel, CodingSubspace, PhotonState, basis_state


class Kind(str, enum.Enum):
    SORTER = "sorter"
    XD = "xd"
    XDP = "xdp"
    CUSTOM = "custom"


class Config(str, enum.Enum):
    MZ = "mz"
    MICHELSON = "michelson"


class Variant(str, enum.Enum):
    A = "a"
    B = "b"
    NA = "na"


@dataclass(frozen=True)
class Network:
    d: int
    sequence: tuple[Element, ...] = ()
    kind: Kind = Kind.CUSTOM
    config: Config = Config.MZ
    variant: Variant = Variant.NA
    subspace: Optional[CodingSubspace] = None
    # (forward index, return index) pairs that are one physical device
    folded_reuse: tuple[tuple[int, int], ...] = ()
    # half-open index ranges [start, stop) forming an F / phases / F^dagger sorter
    sorters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))
        object.__setattr__(self, "folded_reuse", tuple(sorted(map(tuple, self.folded_reuse))))
        object.__setattr__(self, "sorters", tuple(map(tuple, self.sorters)))
        if self.d < 1:
            raise InvalidArgumentError(f"network needs at least one mode, got d={self.d}")
        for e in self.sequence:
            e.check(self.d)
        n = len(self.sequence)
        for i, j in self.folded_reuse:
            if not 0 <= i < j < n:
                raise InvalidArgumentError(f"folded pair ({i}, {j}) out of order or range")
            if not same_element(self.sequence[i].adjoint(), self.sequence[j]):
                raise InvalidArgumentError(
                    f"folded pair ({i}, {j}): {self.sequence[j]!r} is not the adjoint of "
                    f"{self.sequence[i]!r}"
                )
        for start, stop in self.sorters:
            if not 0 <= start < stop <= n:
                raise InvalidArgumentError(f"sorter range ({start}, {stop}) out of range")

    def __len__(self) -> int:
        return len(self.sequence)

    def without(self, index: int) -> Network:
        """Copy with one element deleted; tags touching it are dropped."""
        if not 0 <= index < len(self.sequence):
            raise IndexError(index)

        def shift(i: int) -> int:
            return i - 1 if i > index else i

        seq = self.sequence[:index] + self.sequence[index + 1 :]
        folded = tuple(
            (shift(i), shift(j)) for i, j in self.folded_reuse if index not in (i, j)
        )
        sorters = tuple(
            (shift(a), shift(b)) for a, b in self.sorters if not a <= index < b
        )
        return replace(self, sequence=seq, folded_reuse=folded, sorters=sorters, kind=Kind.CUSTOM)

    def swapped(self, i: int, j: int) -> Network:
        """Copy with elements ``i`` and ``j`` exchanged and all tags cleared."""
        seq = list(self.sequence)
        seq[i], seq[j] = seq[j], seq[i]
        return replace(self, sequence=tuple(seq), folded_reuse=(), sorters=(), kind=Kind.CUSTOM)


def _check_dp(d: int, p: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidArgumentError(f"d must be an integer >= 2, got {d!r}")
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise InvalidArgumentError(f"p must be a positive integer, got {p!r}")


def sorter_elements(d: int, p: int = 1, inverse: bool = False, offset: int = 0) -> list[Element]:
    forward = [ModeFourier(d), SorterPhases(d, p, offset), ModeFourier(d, inverse=True)]
    if inverse:
        return [e.adjoint() for e in reversed(forward)]
    return forward


def build_sorter(d: int, p: int = 1, inverse: bool = False, offset: int = 0) -> Network:
    """Sorter ``S_d^{1/p}``: ``|offset + j p>|m> -> |offset + j p>|m + offset + j>``.

    For ``offset = 0`` this is ``|j p>|m> -> |j p>|m + j mod d>``.
    """
    _check_dp(d, p)
    return Network(
        d,
        sorter_elements(d, p, inverse, offset),
        kind=Kind.SORTER,
        sorters=((0, 3),),
    )


def _parse_variant(variant) -> Variant:
    try:
        v = Variant(str(getattr(variant, "value", variant)).lower())
    except ValueError:
        raise InvalidArgumentError(f"unknown variant {variant!r}") from None
    if v is Variant.NA:
        raise InvalidArgumentError("gate variant must be A or B")
    return v


def _parse_config(config) -> Config:
    try:
        return Config(str(getattr(config, "value", config)).lower())
    except ValueError:
        raise InvalidArgumentError(f"unknown config {config!r}") from None


def build_xdp(d: int, p: int = 1, ell0: int = 0, variant="a") -> Network:
    """Mach-Zehnder ``X_d(p)`` on ``{ell0 + j p}`` with two sorters and two SPPs.

    Variant A moves ``SPP(-p d)`` to mode ``k = ell0 mod d``; variant B wraps the
    ``ell0 = 0`` device in ``SPP(-k)`` / ``SPP(+k)``.
    """
    _check_dp(d, p)
    v = _parse_variant(variant)
    sub = CodingSubspace(d, p, ell0)
    k = sub.k
    seq: list[Element] = []
    if v is Variant.A:
        offset, control = ell0, k
    else:
        offset, control = ell0 - k, 0
        if k:
            seq.append(Spp(-k))
    seq.append(Spp(p))
    first = len(seq)
    seq += sorter_elements(d, p, offset=offset)
    seq.append(Spp(-p * d, control_mode=control))
    second = len(seq)
    seq += sorter_elements(d, p, inverse=True, offset=offset)
    if v is Variant.B and k:
        seq.append(Spp(k))
    return Network(
        d,
        seq,
        kind=Kind.XDP,
        config=Config.MZ,
        variant=v,
        subspace=sub,
        sorters=((first, first + 3), (second, second + 3)),
    )


def build_xd(d: int) -> Network:
    """``X_d``: ``[SPP(+1), S_d, SPP(-d) on mode 0, S_d^-1]``."""
    return replace(build_xdp(d, 1, 0, Variant.A), kind=Kind.XD)


def build_michelson(d: int, p: int = 1, ell0: int = 0, variant="a") -> Network:
    """Folded ``X_d(p)`` reusing one physical sorter.

    Unrolled order: ``SPP(+p)`` on the input arm, the circulator, (variant B:
    ``SPP(-k)``), the forward sorter pass, ``SPP(-p d)`` with its mirror on the
    corrected mode, retro-reflectors on every other mode, the return sorter
    pass and (variant B) the return pass through ``SPP(-k)``.
    """
    _check_dp(d, p)
    v = _parse_variant(variant)
    sub = CodingSubspace(d, p, ell0)
    k = sub.k
    if v is Variant.A:
        offset, control = ell0, k
    else:
        offset, control = ell0 - k, 0
    seq: list[Element] = [Spp(p), Circulator()]
    folded: list[tuple[int, int]] = []
    kshift = None
    if v is Variant.B and k:
        kshift = len(seq)
        seq.append(Spp(-k))
    fwd = len(seq)
    seq += sorter_elements(d, p, offset=offset)
    seq.append(Spp(-p * d, control_mode=control))
    seq += [RetroReflector(m) for m in range(d) if m != control]
    ret = len(seq)
    seq += [e.adjoint() for e in reversed(seq[fwd : fwd + 3])]
    folded += [(fwd + t, ret + 2 - t) for t in range(3)]
    if kshift is not None:
        folded.append((kshift, len(seq)))
        seq.append(seq[kshift].adjoint())
    return Network(
        d,
        seq,
        kind=Kind.XDP,
        config=Config.MICHELSON,
        variant=v,
        subspace=sub,
        folded_reuse=tuple(folded),
        sorters=((fwd, fwd + 3), (ret, ret + 3)),
    )


def build_gate(d: int, p: int = 1, ell0: int = 0, variant="a", config="mz") -> Network:
    if _parse_config(config) is Config.MICHELSON:
        return build_michelson(d, p, ell0, variant)
    return build_xdp(d, p, ell0, variant)


def apply_network(net: Network, s: PhotonState) -> PhotonState:
    if s.mode_count != net.d:
        raise InvalidArgumentError(
            f"state has {s.mode_count} modes, network expects {net.d}"
        )
    for e in net.sequence:
        try:
            s = e.apply(s)
        except InvalidArgumentError as exc:
            raise InvalidArgumentError(f"{type(e).__name__}: {exc}") from exc
    return s


def network_matrix(
    net: Network, oam_window: WindowLike, require_closed: bool = True
) -> np.ndarray:
    """Matrix of the whole network on a basis window (lexicographic order).

    With ``require_closed=False`` the compression ``P U P`` to the window is
    returned even if some amplitude leaves it.
    """
    return sequence_matrix(net.sequence, net.d, oam_window, require_closed=require_closed)


def minimal_window(
    net: Network,
    seeds: Optional[Sequence[tuple[int, int]]] = None,
    max_labels: Optional[int] = None,
) -> list[BasisLabel]:
    """Smallest basis-label set containing ``seeds`` that the network maps into itself.

    Seeds default to every coding value on every mode. The closure is found by
    pushing each new label through the network and collecting the support of
    its image; a cap guards against networks with no finite closure. The
    default cap of ``16 d**2`` labels sits well above every correctly built
    gate (those need about ``2 d**2``) and keeps escapes cheap to detect.
    """
    if max_labels is None:
        max_labels = 16 * net.d * net.d
    if seeds is None:
        if net.subspace is None:
            raise InvalidArgumentError("network has no coding subspace; pass explicit seeds")
        seeds = [(ell, m) for ell in net.subspace.values() for m in range(net.d)]
    seen = {BasisLabel(int(e), int(m)) for e, m in seeds}
    frontier = list(seen)
    while frontier:
        nxt = []
        for label in frontier:
            out = apply_network(net, basis_state(label.ell, label.mode, net.d))
            for lab, amp in out.items():
                if abs(amp) >= PRUNE_THRESHOLD and lab not in seen:
                    seen.add(lab)
                    nxt.append(lab)
        if len(seen) > max_labels:
            raise WindowEscapeError(
                f"no closed window with at most {max_labels} labels"
            )
        frontier = nxt
    return sorted(seen)


@dataclass(frozen=True)
class ResourceTally:
    sorter_count: int = 0
    spp_list: tuple[int, ...] = ()
    fourier_count: int = 0
    dove_phase_count: int = 0
    beamsplitter_count: int = 0
    mode_phase_count: int = 0
    circulator_count: int = 0
    retroreflector_count: int = 0

    @property
    def spp_count(self) -> int:
        return len(self.spp_list)

    def to_dict(self) -> dict:
        return {
            "sorter_count": self.sorter_count,
            "spp_count": self.spp_count,
            "spp_list": list(self.spp_list),
            "fourier_count": self.fourier_count,
            "dove_phase_count": self.dove_phase_count,
            "beamsplitter_count": self.beamsplitter_count,
            "mode_phase_count": self.mode_phase_count,
            "circulator_count": self.circulator_count,
            "retroreflector_count": self.retroreflector_count,
        }


def tally_resources(net: Network) -> ResourceTally:
    """Count physical devices; a folded Michelson pair is one device."""
    reused = {j for _, j in net.folded_reuse}
    counts: Counter = Counter()
    spps = []
    for i, e in enumerate(net.sequence):
        if i in reused:
            continue
        if isinstance(e, Spp):
            spps.append(e.n)
        elif isinstance(e, ModeFourier):
            counts["fourier"] += 1
        elif isinstance(e, SorterPhases):
            # arm 0 carries no phase
            counts["dove"] += e.d - 1
        elif isinstance(e, DovePhase):
            counts["dove"] += 1
        elif isinstance(e, BeamSplitter):
            counts["bs"] += 1
        elif isinstance(e, ModePhase):
            counts["phase"] += 1
        elif isinstance(e, Circulator):
            counts["circ"] += 1
        elif isinstance(e, RetroReflector):
            counts["retro"] += 1
    sorter_count = sum(1 for start, _ in net.sorters if start not in reused)
    return ResourceTally(
        sorter_count=sorter_count,
        spp_list=tuple(sorted(spps)),
        fourier_count=counts["fourier"],
        dove_phase_count=counts["dove"],
        beamsplitter_count=counts["bs"],
        mode_phase_count=counts["phase"],
        circulator_count=counts["circ"],
        retroreflector_count=counts["retro"],
    )
