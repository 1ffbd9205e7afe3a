"""TSPLIB instance parsing, serialization and best-known-optima registries.

Supports the EUC_2D and EXPLICIT (FULL_MATRIX) subset of the TSPLIB
format.  Parsed instances are immutable and safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "TsplibParseError",
    "RegistryError",
    "TspInstance",
    "OptimaRegistry",
    "parse_tsplib",
    "serialize_tsplib",
    "distance",
    "load_optima",
]

EUC_2D = "EUC_2D"
EXPLICIT = "EXPLICIT"
TSPLIB_NINT = "TSPLIB_NINT"
EXACT = "EXACT"


class TsplibParseError(ValueError):
    """Malformed TSPLIB input (carries the offending key/line where known)."""


class RegistryError(ValueError):
    """Malformed optima registry input."""


@dataclass(frozen=True)
class TspInstance:
    """A parsed TSP problem: coordinates or an explicit cost matrix."""

    name: str
    dimension: int
    weight_kind: str  # EUC_2D | EXPLICIT
    rounding: str = TSPLIB_NINT  # TSPLIB_NINT | EXACT
    coords: tuple[tuple[float, float], ...] | None = None
    explicit_costs: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.dimension < 2:
            raise TsplibParseError(f"dimension must be >= 2, got {self.dimension}")
        if self.weight_kind not in (EUC_2D, EXPLICIT):
            raise TsplibParseError(f"unsupported weight kind: {self.weight_kind}")
        if self.rounding not in (TSPLIB_NINT, EXACT):
            raise TsplibParseError(f"unsupported rounding mode: {self.rounding}")
        if self.weight_kind == EUC_2D:
            if self.coords is None or self.explicit_costs is not None:
                raise TsplibParseError("EUC_2D instance requires coords and no cost matrix")
            if len(self.coords) != self.dimension:
                raise TsplibParseError(
                    f"dimension mismatch: DIMENSION is {self.dimension} but "
                    f"{len(self.coords)} coordinates present"
                )
        else:
            if self.explicit_costs is None or self.coords is not None:
                raise TsplibParseError("EXPLICIT instance requires a cost matrix and no coords")
            if len(self.explicit_costs) != self.dimension:
                raise TsplibParseError(
                    f"dimension mismatch: DIMENSION is {self.dimension} but "
                    f"matrix has {len(self.explicit_costs)} rows"
                )
            for i, row in enumerate(self.explicit_costs):
                if len(row) != self.dimension:
                    raise TsplibParseError(f"matrix row {i} has length {len(row)}")
                for c in row:
                    if not math.isfinite(c) or c < 0:
                        raise TsplibParseError(f"explicit cost must be finite and >= 0, got {c}")

    def with_rounding(self, rounding: str) -> "TspInstance":
        return replace(self, rounding=rounding)


@dataclass(frozen=True)
class OptimaRegistry:
    """Best-known tour lengths keyed by instance name."""

    entries: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, length in self.entries.items():
            if length <= 0:
                raise RegistryError(f"non-positive optimum for {name!r}: {length}")

    def get(self, name: str) -> float | None:
        return self.entries.get(name)

    def __len__(self) -> int:
        return len(self.entries)


def _nint(x: float) -> float:
    # TSPLIB nearest-integer rule.
    return math.floor(x + 0.5)


def distance(inst: TspInstance, i: int, j: int) -> float:
    """Edge cost between nodes i and j under the instance's rounding mode."""
    n = inst.dimension
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range: ({i}, {j}) for dimension {n}")
    if inst.weight_kind == EXPLICIT:
        return float(inst.explicit_costs[i][j])
    if i == j:
        return 0.0
    (xi, yi), (xj, yj) = inst.coords[i], inst.coords[j]
    d = math.hypot(xi - xj, yi - yj)
    return _nint(d) if inst.rounding == TSPLIB_NINT else d


def cost_matrix(inst: TspInstance) -> np.ndarray:
    """Full n-by-n cost matrix of the instance."""
    if inst.weight_kind == EXPLICIT:
        return np.array(inst.explicit_costs, dtype=float)
    pts = np.array(inst.coords, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff * diff).sum(axis=2))
    if inst.rounding == TSPLIB_NINT:
        d = np.floor(d + 0.5)
    np.fill_diagonal(d, 0.0)
    return d


def _parse_number(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise TsplibParseError(f"line {lineno}: non-numeric value {tok!r}") from None


def parse_tsplib(text: str) -> TspInstance:
    """Parse the supported TSPLIB subset into a TspInstance.

    Header keys other than the ones used are ignored; the EOF marker is
    optional.  EDGE_WEIGHT_TYPE must be EUC_2D or EXPLICIT (FULL_MATRIX).
    """
    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    weights: list[float] = []
    section = None
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line == "EOF":
            continue
        upper = line.upper()
        if section is None:
            if upper.startswith("NODE_COORD_SECTION"):
                section = "coords"
                continue
            if upper.startswith("EDGE_WEIGHT_SECTION"):
                section = "weights"
                continue
            if ":" in line:
                key, value = (part.strip() for part in line.split(":", 1))
                header[key.upper()] = value
                continue
            raise TsplibParseError(f"line {lineno}: unexpected content {line!r} before a data section")
        if upper.startswith(("NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION", "DISPLAY_DATA_SECTION")):
            raise TsplibParseError(f"line {lineno}: multiple data sections are not supported")
        toks = line.split()
        if section == "coords":
            if len(toks) != 3:
                raise TsplibParseError(f"line {lineno}: expected 'index x y', got {line!r}")
            coords.append((_parse_number(toks[1], lineno), _parse_number(toks[2], lineno)))
        else:
            weights.extend(_parse_number(t, lineno) for t in toks)

    for key in ("NAME", "DIMENSION", "EDGE_WEIGHT_TYPE"):
        if key not in header:
            raise TsplibParseError(f"missing required header key {key}")
    name = header["NAME"]
    try:
        dimension = int(header["DIMENSION"])
    except ValueError:
        raise TsplibParseError(f"DIMENSION is not an integer: {header['DIMENSION']!r}") from None
    ewt = header["EDGE_WEIGHT_TYPE"].upper()

    if ewt == EUC_2D:
        if not coords:
            raise TsplibParseError("EUC_2D instance is missing NODE_COORD_SECTION")
        if weights:
            raise TsplibParseError("EUC_2D instance must not carry EDGE_WEIGHT_SECTION")
        return TspInstance(
            name=name, dimension=dimension, weight_kind=EUC_2D, coords=tuple(coords)
        )
    if ewt == EXPLICIT:
        fmt = header.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX").upper()
        if fmt != "FULL_MATRIX":
            raise TsplibParseError(f"unsupported EDGE_WEIGHT_FORMAT: {fmt} (only FULL_MATRIX)")
        if not weights:
            raise TsplibParseError("EXPLICIT instance is missing EDGE_WEIGHT_SECTION")
        if coords:
            raise TsplibParseError("EXPLICIT instance must not carry NODE_COORD_SECTION")
        if len(weights) != dimension * dimension:
            raise TsplibParseError(
                f"dimension mismatch: expected {dimension * dimension} matrix entries, "
                f"got {len(weights)}"
            )
        rows = tuple(
            tuple(weights[r * dimension : (r + 1) * dimension]) for r in range(dimension)
        )
        return TspInstance(
            name=name, dimension=dimension, weight_kind=EXPLICIT,
            rounding=EXACT, explicit_costs=rows,
        )
    raise TsplibParseError(f"unsupported EDGE_WEIGHT_TYPE: {ewt} (only EUC_2D and EXPLICIT)")


def serialize_tsplib(inst: TspInstance) -> str:
    """Render an instance back to TSPLIB text (round-trips through parse_tsplib)."""
    out = [
        f"NAME : {inst.name}",
        "TYPE : TSP",
        f"DIMENSION : {inst.dimension}",
        f"EDGE_WEIGHT_TYPE : {inst.weight_kind}",
    ]
    if inst.weight_kind == EUC_2D:
        out.append("NODE_COORD_SECTION")
        for idx, (x, y) in enumerate(inst.coords, start=1):
            out.append(f"{idx} {float(x)!r} {float(y)!r}")
    else:
        out.append("EDGE_WEIGHT_FORMAT : FULL_MATRIX")
        out.append("EDGE_WEIGHT_SECTION")
        for row in inst.explicit_costs:
            out.append(" ".join(repr(float(c)) for c in row))
    out.append("EOF")
    return "\n".join(out) + "\n"


def load_optima(text: str) -> OptimaRegistry:
    """Parse an optima registry: lines of "name length", "#" comments allowed."""
    entries: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 2:
            raise RegistryError(f"line {lineno}: expected 'name length', got {line!r}")
        name, val = toks
        if name in entries:
            raise RegistryError(f"line {lineno}: duplicate instance name {name!r}")
        try:
            length = float(val)
        except ValueError:
            raise RegistryError(f"line {lineno}: non-numeric length {val!r}") from None
        if length <= 0:
            raise RegistryError(f"line {lineno}: non-positive length {length}")
        entries[name] = length
    return OptimaRegistry(entries=entries)
