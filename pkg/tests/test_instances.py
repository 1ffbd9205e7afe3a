import math

import numpy as np
import pytest

from tspbound import (
    OptimaRegistry,
    TspInstance,
    cost_matrix,
    distance,
    load_optima,
    parse_tsplib,
    serialize_tsplib,
)
from tspbound.instances import EXACT, TSPLIB_NINT, RegistryError, TsplibParseError

MINIMAL = """\
NAME : square
TYPE : TSP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 1 0
3 1 1
4 0 1
EOF
"""


def test_parse_minimal_euc2d():
    inst = parse_tsplib(MINIMAL)
    assert inst.name == "square"
    assert inst.dimension == 4
    assert inst.weight_kind == "EUC_2D"
    assert inst.coords == ((0, 0), (1, 0), (1, 1), (0, 1))


def test_parse_ignores_unknown_keys_and_missing_eof():
    text = MINIMAL.replace("TYPE : TSP", "TYPE : TSP\nCOMMENT : whatever\nCAPACITY : 7")
    text = text.replace("EOF\n", "")
    assert parse_tsplib(text).dimension == 4


def test_dimension_mismatch():
    text = MINIMAL.replace("DIMENSION : 4", "DIMENSION : 3")
    with pytest.raises(TsplibParseError, match="dimension mismatch"):
        parse_tsplib(text)


@pytest.mark.parametrize("key", ["NAME", "DIMENSION", "EDGE_WEIGHT_TYPE"])
def test_missing_header_key_named(key):
    text = "\n".join(
        line for line in MINIMAL.splitlines() if not line.startswith(key)
    )
    with pytest.raises(TsplibParseError, match=key):
        parse_tsplib(text)


def test_non_numeric_coordinate_reports_line():
    text = MINIMAL.replace("3 1 1", "3 one 1")
    with pytest.raises(TsplibParseError, match="line 8"):
        parse_tsplib(text)


def test_unsupported_weight_type():
    text = MINIMAL.replace("EUC_2D", "GEO")
    with pytest.raises(TsplibParseError, match="GEO"):
        parse_tsplib(text)


def test_parse_explicit_full_matrix():
    text = """\
NAME : tiny
DIMENSION : 3
EDGE_WEIGHT_TYPE : EXPLICIT
EDGE_WEIGHT_FORMAT : FULL_MATRIX
EDGE_WEIGHT_SECTION
0 1 2
1 0 3
2 3 0
EOF
"""
    inst = parse_tsplib(text)
    assert inst.weight_kind == "EXPLICIT"
    assert inst.explicit_costs[1][2] == 3


def test_roundtrip_random_50_node():
    rng = np.random.default_rng(7)
    coords = tuple((float(x), float(y)) for x, y in rng.random((50, 2)) * 1000)
    inst = TspInstance(
        name="rand50", dimension=50, weight_kind="EUC_2D", coords=coords
    )
    again = parse_tsplib(serialize_tsplib(inst))
    assert again == inst
    # and once more: parse-serialize-parse is the identity
    assert parse_tsplib(serialize_tsplib(again)) == again


def test_roundtrip_explicit():
    rng = np.random.default_rng(3)
    m = rng.random((5, 5))
    m = (m + m.T) / 2
    np.fill_diagonal(m, 0.0)
    inst = TspInstance(
        name="ex5", dimension=5, weight_kind="EXPLICIT", rounding=EXACT,
        explicit_costs=tuple(tuple(row) for row in m),
    )
    assert parse_tsplib(serialize_tsplib(inst)) == inst


def _coords_instance(coords, rounding):
    return TspInstance(
        name="t", dimension=len(coords), weight_kind="EUC_2D",
        rounding=rounding, coords=tuple(coords),
    )


class TestDistance:
    def test_pythagorean(self):
        for rounding in (TSPLIB_NINT, EXACT):
            inst = _coords_instance([(0, 0), (3, 4)], rounding)
            assert distance(inst, 0, 1) == 5

    def test_unit_diagonal(self):
        inst = _coords_instance([(0, 0), (1, 1)], TSPLIB_NINT)
        assert distance(inst, 0, 1) == 1
        inst = _coords_instance([(0, 0), (1, 1)], EXACT)
        assert distance(inst, 0, 1) == pytest.approx(math.sqrt(2), abs=0)

    def test_self_distance_zero(self):
        inst = _coords_instance([(5, 5), (1, 1)], TSPLIB_NINT)
        assert distance(inst, 1, 1) == 0

    def test_out_of_range(self):
        inst = _coords_instance([(0, 0), (1, 1)], EXACT)
        with pytest.raises(IndexError):
            distance(inst, 0, 2)

    @pytest.mark.parametrize("rounding", [TSPLIB_NINT, EXACT])
    def test_symmetry(self, rounding):
        rng = np.random.default_rng(11)
        inst = _coords_instance([tuple(p) for p in rng.random((12, 2)) * 100], rounding)
        for i in range(12):
            for j in range(12):
                assert distance(inst, i, j) == distance(inst, j, i)

    def test_nint_distances_are_integers(self):
        rng = np.random.default_rng(2)
        inst = _coords_instance([tuple(p) for p in rng.random((10, 2)) * 50], TSPLIB_NINT)
        m = cost_matrix(inst)
        assert np.array_equal(m, np.floor(m))


class TestOptima:
    def test_two_lines(self):
        reg = load_optima("a 10\nb 20.5\n")
        assert len(reg) == 2
        assert reg.get("b") == 20.5

    def test_duplicate_name(self):
        with pytest.raises(RegistryError, match="duplicate instance name"):
            load_optima("a 10\na 11\n")

    def test_empty(self):
        assert len(load_optima("")) == 0

    def test_comments_and_blanks(self):
        reg = load_optima("# header\n\na 10\n")
        assert len(reg) == 1

    def test_non_positive_length(self):
        with pytest.raises(RegistryError, match="non-positive"):
            load_optima("a 0\n")

    def test_registry_type_rejects_non_positive(self):
        with pytest.raises(RegistryError):
            OptimaRegistry(entries={"a": -1.0})
