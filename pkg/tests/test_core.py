import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intheffter.core import (
    Block,
    FourSet,
    IntervalD,
    PartialArray,
    SupportSet,
    array_from_json,
    array_to_json,
    block_transform,
    format_text,
    ihs_from_json,
    ihs_to_json,
    interval_set,
    parse_text,
    sum_profile,
    support_of,
    verify_ihs,
    verify_integer_heffter,
)
from intheffter.errors import InvalidParameters
from intheffter.ihs import appendix_ihs

A_PRIME = [[11, -14, 3], [-12, 5, 7], [1, 9, -10]]


def test_interval_set_examples():
    assert interval_set(1, 7, 2) == {1, 3, 5, 7}
    assert interval_set(5, 4, 1) == set()
    assert interval_set(2, 14, 4) == {2, 6, 10, 14}
    assert interval_set(3, 6) == {3, 4, 5, 6}


def test_malformed_interval_rejected():
    with pytest.raises(InvalidParameters):
        interval_set(1, 6, 2)
    with pytest.raises(InvalidParameters):
        IntervalD(1, 5, 0)


@given(st.integers(-50, 50), st.integers(0, 30), st.integers(1, 6))
def test_interval_cardinality_and_ends(a, steps, d):
    b = a + steps * d
    iv = IntervalD(a, b, d)
    assert len(iv) == (b - a) // d + 1
    assert min(iv) == a and max(iv) == b
    assert all(v in iv for v in range(a, b + 1, d))


def test_four_set_elements():
    assert FourSet(6, 2).elements == (6, 8, 10, 12)
    with pytest.raises(InvalidParameters):
        FourSet(1, 3)


def test_sum_profile_examples():
    p = sum_profile(Block([[1, -1], [-2, 2]]))
    assert p.row_sums == (0, 0) and p.col_sums == (-1, 1)
    assert sum_profile(Block(A_PRIME)).is_zero()


def test_block_rejects_zero_entries():
    with pytest.raises(InvalidParameters):
        Block([[1, 0]])


def test_partial_array_rejects_stored_zero():
    with pytest.raises(InvalidParameters):
        PartialArray([[1, 0]])
    a = PartialArray([[1, None], [None, -1]])
    assert a.filled().sum() == 2


def test_support_of_counts_multiplicity():
    s = support_of([Block([[3, -3]])])
    assert s[3] == 2 and not s.is_set()
    assert support_of([Block(A_PRIME)]) == {1, 3, 5, 7, 9, 10, 11, 12, 14}


def test_support_of_a_alpha_example():
    from intheffter.blocks import a_alpha

    want = set(range(1, 16, 2)) | {2, 6} | set(range(16, 20)) | {26, 27, 32, 33}
    assert a_alpha(0, 15, 1).support() == want
    assert a_alpha(0, 15, 1).members[0].tolist() == [[2, 11, -13], [3, 16, -19], [-5, -27, 32]]


def test_block_transforms():
    assert block_transform(Block([[1, -2]]), "negate").tolist() == [[-1, 2]]
    assert block_transform(Block([[1, 2], [3, 4]]), "transpose").tolist() == [[1, 3], [2, 4]]
    mj = Block([[-6, 8], [10, -12]])
    assert block_transform(mj, "negate-transpose").tolist() == [[6, -10], [-8, 12]]
    with pytest.raises(InvalidParameters):
        block_transform(mj, "rotate")


nonzero = st.integers(-99, 99).filter(bool)


@st.composite
def blocks(draw):
    r, c = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    return Block(draw(st.lists(st.lists(nonzero, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(blocks(), st.sampled_from(["negate", "transpose", "negate-transpose"]))
def test_transforms_preserve_support(b, t):
    out = block_transform(b, t)
    assert support_of([out]) == support_of([b])
    p, q = b.profile(), out.profile()
    if t == "negate":
        assert q.row_sums == tuple(-v for v in p.row_sums)
    elif t == "transpose":
        assert (q.row_sums, q.col_sums) == (p.col_sums, p.row_sums)


@given(blocks())
def test_profile_totals_agree(b):
    p = b.profile()
    assert sum(p.row_sums) == sum(p.col_sums)
    assert len(p.row_sums) == b.entries.shape[0] and len(p.col_sums) == b.entries.shape[1]


def test_verify_heffter_single_appendix_member_has_gap():
    first = appendix_ihs(3)[0]
    report = verify_integer_heffter(first, 7, 7)
    assert not report.passed
    # sums and counts hold; only the support clause fails
    assert "support-gap" in report.axioms()
    assert report.axioms() <= {"support-gap", "support-range"}


def test_verify_heffter_singleton():
    report = verify_integer_heffter(PartialArray([[1]]), 1, 1)
    assert "row-sum" in report.axioms() and "col-sum" in report.axioms()
    # support {1} is [1, nk] for n = k = 1, so only the sums can fail
    assert not report.axioms() & {"support-gap", "support-duplicate", "support-range"}


def test_verify_heffter_reports_every_clause():
    a = PartialArray([[1, 1, None], [None, -1, 5]])
    report = verify_integer_heffter(a, 2, 2)
    assert {"col-count", "support-duplicate", "row-sum", "col-sum"} <= report.axioms()
    assert report.passed == (not report.violations)


def test_verify_ihs_appendix_and_perturbation():
    arrays = appendix_ihs(3)
    assert verify_ihs(arrays, 7, 7, 3).passed
    assert verify_ihs(appendix_ihs(7), 7, 7, 7).passed
    bad = [a.cells.copy() for a in arrays]
    bad[1][2, 4] *= -1
    report = verify_ihs(bad, 7, 7, 3)
    assert "row-sum" in report.axioms()
    assert any(v.location == "array 1 row 2" for v in report.violations)


def test_verify_ihs_wrong_count_and_shape():
    arrays = appendix_ihs(3)
    assert "array-count" in verify_ihs(arrays[:2], 7, 7, 3).axioms()
    assert "shape" in verify_ihs(arrays, 7, 6, 3).axioms()


def test_verifier_is_pure():
    arrays = appendix_ihs(3)
    assert verify_ihs(arrays, 7, 7, 4).violations == verify_ihs(arrays, 7, 7, 4).violations


def test_text_format_round_trip():
    a = PartialArray([[1, None, -1], [None, 2, -2]])
    text = format_text(a)
    assert text == "1 . -1\n. 2 -2"
    (back,) = parse_text(text)
    assert back == a


def test_json_round_trip():
    a = PartialArray([[1, None], [-3, 4]])
    doc = array_to_json(a)
    assert doc == {"m": 2, "n": 2, "cells": [[1, None], [-3, 4]]}
    assert array_from_json(json.loads(json.dumps(doc))) == a
    arrays = appendix_ihs(3)
    back, m, n, c = ihs_from_json(json.dumps(ihs_to_json(arrays, 7, 7)))
    assert (m, n, c) == (7, 7, 3)
    assert all(np.array_equal(x.cells, y.cells) for x, y in zip(arrays, back))


def test_json_size_mismatch_rejected():
    with pytest.raises(InvalidParameters):
        array_from_json({"m": 3, "n": 2, "cells": [[1, -1]]})


def test_support_set_equality_with_sets():
    s = SupportSet([1, 2, 2])
    assert s != {1, 2}
    assert s.duplicates() == {2: 2}
