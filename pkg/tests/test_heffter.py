from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intheffter.core import PartialArray, support_of, verify_ihs, verify_integer_heffter
from intheffter.errors import ExternalConstruction, InvalidParameters, OpenCase
from intheffter.heffter import (
    Feasibility,
    HeffterParams,
    build_integer_heffter,
    classify,
    ihs_regroup,
    ihs_to_heffter,
    necessary_conditions,
)
from intheffter.ihs import appendix_ihs, build_ihs


def small_h():
    """An integer H(3,4;4,3), i.e. an IHS(3,4;1)."""
    return PartialArray([[1, 2, 3, -6], [8, -12, -7, 11], [-9, 10, 4, -5]])


class TestCompose:
    def test_identity_c1(self):
        h = small_h()
        out = ihs_to_heffter([h], 3, 4, 1)
        assert np.array_equal(out.cells, h.cells)

    def test_ihs_7_9_4(self):
        out = ihs_to_heffter(build_ihs(7, 9, 4), 7, 9, 1)
        assert out.shape == (28, 36)
        assert verify_integer_heffter(out, 9, 7).passed

    @pytest.mark.parametrize("c,e", [(3, 1), (7, 1), (7, 7), (11, 7)])
    def test_counts_wraparound(self, c, e):
        # IHS(7,7;c) read as IHS(a, b e; c) with a = 7 and b e = 7
        b = 7 // e
        out = ihs_to_heffter(appendix_ihs(c), 7, b, e)
        filled = out.filled()
        assert set(filled.sum(axis=1).tolist()) == {b * e}
        assert set(filled.sum(axis=0).tolist()) == {7 * e}

    def test_exact_placement(self):
        arrays = build_ihs(7, 9, 4)
        out = ihs_to_heffter(arrays, 7, 9, 1)
        for ell, arr in enumerate(arrays):
            block = out.cells[7 * ell:7 * ell + 7, 9 * ell:9 * ell + 9]
            assert np.array_equal(block, arr.cells)

    def test_rejects(self):
        arrays = appendix_ihs(3)
        with pytest.raises(InvalidParameters):
            ihs_to_heffter(arrays, 7, 1, 7)
        bad = [a.cells.copy() for a in arrays]
        bad[0][0, 0] = -bad[0][0, 0]
        with pytest.raises(InvalidParameters):
            ihs_to_heffter(bad, 7, 7, 1)


class TestRegroup:
    def test_identity(self):
        arrays = build_ihs(7, 9, 4)
        out = ihs_regroup(arrays, 1)
        assert all(np.array_equal(a.cells, b.cells) for a, b in zip(arrays, out))

    def test_pairs(self):
        arrays = build_ihs(7, 9, 8)
        out = ihs_regroup(arrays, 2)
        assert len(out) == 4
        assert verify_ihs(out, 7, 18, 4).passed
        assert support_of(out) == support_of(arrays)

    def test_not_divisible(self):
        with pytest.raises(InvalidParameters):
            ihs_regroup(appendix_ihs(3), 2)


@pytest.mark.parametrize(
    "quad",
    [(28, 36, 9, 7), (36, 28, 7, 9), (44, 28, 7, 11), (14, 36, 18, 7), (22, 28, 14, 11), (26, 36, 18, 13)],
)
def test_build_integer_heffter(quad):
    m, n, s, k = quad
    arr = build_integer_heffter(*quad)
    assert arr.shape == (m, n)
    assert verify_integer_heffter(arr, s, k).passed
    assert support_of([arr]).covers_exactly(1, n * k)


def test_build_with_common_divisor():
    # d = 3: s = 27, k = 21 -> k1 = 7, s1 = 9
    arr = build_integer_heffter(28, 36, 27, 21)
    assert verify_integer_heffter(arr, 27, 21).passed


@pytest.mark.parametrize("quad", [(28, 36, 9, 7), (44, 28, 7, 11), (14, 36, 18, 7)])
def test_transpose_invariant(quad):
    m, n, s, k = quad
    assert np.array_equal(build_integer_heffter(m, n, s, k).cells, build_integer_heffter(n, m, k, s).cells.T)


def test_build_errors():
    with pytest.raises(InvalidParameters):
        build_integer_heffter(7, 7, 7, 6)
    with pytest.raises(InvalidParameters):
        build_integer_heffter(45, 63, 14, 10)
    with pytest.raises(ExternalConstruction) as info:
        build_integer_heffter(7, 9, 9, 7)
    assert info.value.verdict.case == 2
    with pytest.raises(ExternalConstruction) as info:
        build_integer_heffter(7, 8, 8, 7)
    assert info.value.verdict == Feasibility("KnownElsewhere", case=2, detail="m = k and n = s")
    with pytest.raises(OpenCase):
        build_integer_heffter(25, 40, 8, 5)


class TestClassify:
    def test_examples(self):
        assert classify(12, 12, 4, 4) == Feasibility("KnownElsewhere", case=1, detail="s = k")
        f = classify(25, 40, 8, 5)
        assert (f.verdict, f.reason) == ("Open", "k=5")
        assert classify(10, 10, 3, 4).verdict == "NecessaryFail"
        assert classify(28, 36, 9, 7).verdict == "ConstructedHere"

    def test_s_zero_mod_4_is_external(self):
        f = classify(28, 16, 4, 7)
        assert (f.verdict, f.case) == ("KnownElsewhere", 6)

    def test_open_reasons(self):
        assert classify(30, 48, 8, 5).reason == "k=5"
        assert classify(12, 28, 7, 3).reason == "k<7d"
        assert classify(44, 20, 5, 11).reason == "s in {3,5,6,10}"
        f = classify(28, 12, 3, 7)
        assert (f.verdict, f.reason) == ("Open", "s in {3,5,6,10}")

    def test_gcd_three_mod_four_is_external(self):
        f = classify(20, 12, 9, 15)
        assert (f.verdict, f.case) == ("KnownElsewhere", 4)

    def test_transposed_construction(self):
        f = classify(36, 28, 7, 9)
        assert f.verdict == "ConstructedHere"

    @given(st.integers(3, 60), st.integers(3, 60), st.integers(3, 60), st.integers(3, 60))
    @settings(max_examples=500)
    def test_total_and_consistent(self, m, n, s, k):
        f = classify(m, n, s, k)
        assert f.verdict in {"NecessaryFail", "ConstructedHere", "KnownElsewhere", "Open"}
        assert (f.verdict == "NecessaryFail") == bool(necessary_conditions(m, n, s, k))
        if f.verdict == "KnownElsewhere":
            assert 1 <= f.case <= 6
        if f.verdict == "Open":
            assert f.reason in {"k=5", "k<7d", "s in {3,5,6,10}", "unlisted"}

    @given(st.integers(1, 6), st.sampled_from([7, 9, 11, 13]), st.sampled_from([7, 9, 11, 13, 14, 18, 22]))
    @settings(max_examples=40, deadline=None)
    def test_constructed_means_buildable(self, c, k, s):
        d = gcd(s, k)
        m, n = c * k // d, c * s // d
        f = classify(m, n, s, k)
        if f.verdict != "ConstructedHere":
            return
        arr = build_integer_heffter(m, n, s, k)
        assert verify_integer_heffter(arr, s, k).passed

    def test_symmetric_verdict(self):
        for quad in [(28, 36, 9, 7), (25, 40, 8, 5), (12, 12, 4, 4)]:
            m, n, s, k = quad
            assert classify(m, n, s, k).verdict == classify(n, m, k, s).verdict


def test_params_type():
    p = HeffterParams(28, 36, 9, 7)
    assert (p.d, p.k1, p.s1, p.c) == (1, 7, 9, 4)
    with pytest.raises(InvalidParameters):
        HeffterParams(28, 36, 9, 8)


def test_e_larger_than_c_rejected():
    with pytest.raises(InvalidParameters):
        ihs_to_heffter(appendix_ihs(3)[:1], 7, 7, 2)
