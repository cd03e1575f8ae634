"""Line-oriented JSON file formats.

Every file starts with a header object carrying ``format_version``; records
follow one per line. Floats use Python's shortest round-trip repr, so values
survive a write/read cycle bit for bit. Keys are sorted for byte-stable output.

* component list: header (kind ``network`` or ``mesh``, tally, mesh extras),
  then one ``{index, type, params, modes, folded_with?}`` per element;
* verification report: header, then one report object per grid point;
* grid file: a single JSON object with list-valued keys;
* state file: a JSON array of ``[ell, mode, re, im]``.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Union

from .elements import ELEMENT_TYPES, DovePhase, Element
from .errors import InvalidArgumentError
from .mesh import Mesh
from .networks import Config, Kind, Network, Variant, tally_resources
from .state import CodingSubspace, PhotonState

FORMAT_VERSION = 1


class FormatError(InvalidArgumentError):
    """Malformed input file."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=False, separators=(",", ":"))


def write_lines(path: Union[str, Path], objs: Iterable[dict]) -> None:
    text = "".join(dumps(o) + "\n" for o in objs)
    Path(path).write_text(text, encoding="utf-8")


def read_lines(path: Union[str, Path]) -> list[dict]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: {exc.msg} (column {exc.colno})") from None
    if not out:
        raise FormatError(f"{path}: empty file")
    if out[0].get("format_version") != FORMAT_VERSION:
        raise FormatError(f"{path}:1: unsupported format_version {out[0].get('format_version')!r}")
    return out


def element_record(e: Element, index: int, folded_with: int | None = None) -> dict:
    params = {}
    for f in dataclasses.fields(e):
        value = getattr(e, f.name)
        if isinstance(value, Fraction):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        params[f.name] = value
    rec = {"index": index, "type": type(e).__name__, "params": params, "modes": list(e.modes())}
    if folded_with is not None:
        rec["folded_with"] = folded_with
    return rec


def element_from_record(rec: dict, where: str = "") -> Element:
    try:
        cls = ELEMENT_TYPES[rec["type"]]
        params = dict(rec.get("params", {}))
        if cls is DovePhase and "power" in params:
            params["power"] = Fraction(params["power"])
        if "perm" in params:
            params["perm"] = tuple(params["perm"])
        return cls(**params)
    except KeyError as exc:
        raise FormatError(f"{where}: missing or unknown field {exc}") from None
    except TypeError as exc:
        raise FormatError(f"{where}: bad parameters: {exc}") from None


def network_records(net: Network) -> list[dict]:
    partner = {}
    for i, j in net.folded_reuse:
        partner[i], partner[j] = j, i
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "network",
        "d": net.d,
        "network_kind": net.kind.value,
        "config": net.config.value,
        "variant": net.variant.value,
        "subspace": None
        if net.subspace is None
        else {"d": net.subspace.d, "p": net.subspace.p, "ell0": net.subspace.ell0},
        "sorters": [list(r) for r in net.sorters],
        "tally": tally_resources(net).to_dict(),
    }
    body = [element_record(e, i, partner.get(i)) for i, e in enumerate(net.sequence)]
    return [header] + body


def mesh_records(mesh: Mesh, residual: float | None = None) -> list[dict]:
    header = {
        "format_version": FORMAT_VERSION,
        "kind": "mesh",
        "d": mesh.d,
        "scheme": mesh.scheme,
        "output_phases": list(mesh.output_phases),
        "input_permutation": None
        if mesh.input_permutation is None
        else list(mesh.input_permutation),
        "residual": residual,
        "tally": {
            "beamsplitter_count": mesh.beamsplitter_count,
            "phase_shifter_count": mesh.phase_shifter_count,
        },
    }
    return [header] + [element_record(e, i) for i, e in enumerate(mesh.layers)]


def read_components(path: Union[str, Path]) -> Union[Network, Mesh]:
    lines = read_lines(path)
    header, body = lines[0], lines[1:]
    elements = [element_from_record(rec, f"{path}:{n}") for n, rec in enumerate(body, 2)]
    try:
        if header["kind"] == "mesh":
            perm = header.get("input_permutation")
            return Mesh(
                header["d"],
                elements,
                tuple(header["output_phases"]),
                scheme=header.get("scheme", "rectangular"),
                input_permutation=None if perm is None else tuple(perm),
            )
        if header["kind"] == "network":
            folded = sorted(
                (rec["index"], rec["folded_with"])
                for rec in body
                if "folded_with" in rec and rec["folded_with"] > rec["index"]
            )
            sub = header.get("subspace")
            return Network(
                header["d"],
                elements,
                kind=Kind(header.get("network_kind", "custom")),
                config=Config(header.get("config", "mz")),
                variant=Variant(header.get("variant", "na")),
                subspace=None if sub is None else CodingSubspace(sub["d"], sub["p"], sub["ell0"]),
                folded_reuse=tuple(folded),
                sorters=tuple(tuple(r) for r in header.get("sorters", [])),
            )
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}:1: bad header: {exc}") from None
    raise FormatError(f"{path}:1: unknown kind {header.get('kind')!r}")


def parse_state(text: str, d: int, source: str = "<state>") -> list[tuple[int, int, complex]]:
    """Parse ``[[ell, mode, re, im], ...]`` into amplitude triples."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}:{exc.lineno}: {exc.msg} (column {exc.colno})") from None
    if not isinstance(data, list) or not data:
        raise FormatError(f"{source}: expected a non-empty JSON array of [ell, mode, re, im]")
    entries = []
    for n, item in enumerate(data):
        if not (isinstance(item, list) and len(item) == 4):
            raise FormatError(f"{source}: entry {n}: expected [ell, mode, re, im], got {item!r}")
        ell, mode, re, im = item
        if not isinstance(ell, int) or isinstance(ell, bool):
            raise FormatError(f"{source}: entry {n}, field ell: expected integer, got {ell!r}")
        if not isinstance(mode, int) or isinstance(mode, bool) or not 0 <= mode < d:
            raise FormatError(f"{source}: entry {n}, field mode: expected integer in [0, {d}), got {mode!r}")
        for name, x in (("re", re), ("im", im)):
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise FormatError(f"{source}: entry {n}, field {name}: expected number, got {x!r}")
        entries.append((ell, mode, complex(re, im)))
    return entries


def state_records(s: PhotonState) -> list[list]:
    return [[ell, mode, a.real, a.imag] for ell, mode, a in s.sorted_entries()]


GRID_KEYS = ("d", "p", "ell0", "variant", "config")
DEFAULT_GRID = {
    "d": list(range(2, 7)),
    "p": [1, 2],
    "ell0": list(range(-3, 4)),
    "variant": ["a", "b"],
    "config": ["mz", "michelson"],
}


def parse_grid(text: str, source: str = "<grid>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}:{exc.lineno}: {exc.msg} (column {exc.colno})") from None
    if not isinstance(data, dict):
        raise FormatError(f"{source}: expected a JSON object")
    if data.get("format_version", FORMAT_VERSION) != FORMAT_VERSION:
        raise FormatError(f"{source}: unsupported format_version {data['format_version']!r}")
    unknown = set(data) - set(GRID_KEYS) - {"format_version"}
    if unknown:
        raise FormatError(f"{source}: unknown keys {sorted(unknown)}")
    grid = {k: list(v) for k, v in DEFAULT_GRID.items()}
    for key in GRID_KEYS:
        if key not in data:
            continue
        values = data[key]
        if not isinstance(values, list) or not values:
            raise FormatError(f"{source}: field {key}: expected a non-empty list")
        for v in values:
            if key in ("variant", "config"):
                allowed = ("a", "b") if key == "variant" else ("mz", "michelson")
                if v not in allowed:
                    raise FormatError(f"{source}: field {key}: {v!r} not in {allowed}")
            elif not isinstance(v, int) or isinstance(v, bool):
                raise FormatError(f"{source}: field {key}: expected integers, got {v!r}")
        grid[key] = values
    if min(grid["d"]) < 2 or min(grid["p"]) < 1:
        raise FormatError(f"{source}: need d >= 2 and p >= 1")
    return grid
