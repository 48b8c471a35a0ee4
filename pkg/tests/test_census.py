import pytest

from vbcensus.census import (
    census,
    count_bundles,
    expected_count,
    expected_local,
    local_order,
    minimal_period,
    residue_table,
    verify_census,
    CountTable,
    CensusRow,
)
from vbcensus.errors import AmbiguityError, RangeError
from expected_tables import PHI, PSI, THREE_LOCAL, TWO_LOCAL


@pytest.mark.parametrize("l,offset,want", [(5, 1, 2), (6, 1, 1), (26, 2, 12), (35, 2, 6), (3, 1, 2), (4, 2, 1)])
def test_counts(l, offset, want):
    assert count_bundles(l, offset) == want


def test_offset_one_small_range():
    t = census(3, 20, 1)
    assert t.period() == 2
    assert t.residue_table() == {0: 1, 1: 2}


def test_offset_two_small_range():
    t = census(4, 40, 2)
    for r in t.rows:
        assert r.count == PHI[r.l % 24]
        assert dict(r.local) == {2: TWO_LOCAL[r.l % 8], 3: THREE_LOCAL[r.l % 3]}


def test_empty_range():
    t = census(10, 9, 2)
    assert t.rows == [] and t.period() is None and t.residue_table() == {}


def test_ranges():
    with pytest.raises(RangeError):
        count_bundles(3, 2)
    with pytest.raises(RangeError):
        count_bundles(2, 1)
    with pytest.raises(RangeError):
        census(4, 10, 3)
    with pytest.raises(RangeError):
        local_order(5, 0, 2)


def test_reference_data_matches_transcription():
    for l in range(4, 52):
        assert expected_count(l, 2) == PHI[l % 24]
        assert expected_local(l, 2) == TWO_LOCAL[l % 8]
        assert expected_local(l, 3) == THREE_LOCAL[l % 3]
    for l in range(3, 30):
        assert expected_count(l, 1) == PSI[l % 2]


def test_verify_census_flags_mismatch():
    t = census(4, 8, 2)
    assert verify_census(t) == []
    bad = CountTable(2, [CensusRow(5, ((2, 1), (3, 1)), 1)])
    assert verify_census(bad)


def test_minimal_period():
    assert minimal_period({1: 5, 2: 5, 3: 5}) == 1
    assert minimal_period({1: 1, 2: 2, 3: 1, 4: 2}) == 2
    assert minimal_period({}) is None
    with pytest.raises(AmbiguityError):
        residue_table({1: 1, 2: 2, 3: 3}, 2)


def test_json():
    doc = census(4, 10, 2).to_json()
    assert doc["rank_offset"] == 2
    assert doc["rows"][0] == {"l": 4, "count": 1, "local": {"2": 1, "3": 1}}
