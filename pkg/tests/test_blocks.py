import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import disjoint_pool, random_template_params
from intheffter.blocks import (
    TEMPLATE_ARITY,
    TemplateParams,
    a2,
    a3,
    a_alpha,
    b2_family,
    b3_family,
    b4_family,
    b_family,
    c_pair_block,
    check_template,
    d_block,
    four_set_block,
    instantiate_template,
    p2_uncorrected,
    solve_pqr,
    solve_uvxy,
    special_matrices,
    template_grid,
    tile_blocks,
)
from intheffter.core import Block, FourSet, SumProfile, support_of
from intheffter.errors import ConstructionError, InvalidParameters


class TestAFamilies:
    def test_a_alpha_column_profile(self):
        fam = a_alpha(1, 15, 1)
        assert len(fam) == 2
        for b in fam:
            assert b.profile() == SumProfile((0, 0, 0), (4, -2, -2))

    def test_a_alpha_domain(self):
        with pytest.raises(InvalidParameters):
            a_alpha(0, 14, 1)
        with pytest.raises(InvalidParameters):
            a_alpha(0, 40, 0)
        with pytest.raises(InvalidParameters):
            a_alpha(2, 40, 1)

    def test_a2_first_member(self):
        fam = a2(32, 1)
        assert fam.members[0].tolist() == [[10, 21, -31], [9, 32, -41], [-19, -53, 72]]
        assert all(b.profile().is_zero() for b in fam)

    def test_a2_boundary(self):
        a2(32, 1)
        with pytest.raises(InvalidParameters):
            a2(31, 1)

    def test_a3(self):
        assert a3(0, 1).members[0].tolist() == [[9, 10, -19], [20, 31, -51], [-29, -41, 70]]
        assert min(a3(1, 1).support()) == 13
        for alpha in (0, 1):
            for u in (1, 4, 9):
                fam = a3(alpha, u)
                assert len(fam.support()) == 9 * u
                assert fam.support().is_set()
        with pytest.raises(InvalidParameters):
            a3(0, 0)


class TestBFamilies:
    def test_b_family_example(self):
        fam = b_family(0, 0, 1, 0)
        assert [b.tolist() for b in fam["prime"]] == [
            [[1, 11, -12], [-3, -10, 13]],
            [[5, 9, -14], [-7, -8, 15]],
        ]
        assert fam.support() == {1, 3, 5, 7} | set(range(8, 16))

    def test_b_family_empty(self):
        fam = b_family(1, 5, 0, 0)
        assert len(fam) == 0 and not fam.support()

    def test_b_family_double_profile(self):
        fam = b_family(1, 3, 2, 3)
        assert len(fam["prime"]) == 4 and len(fam["double"]) == 6
        assert {b.profile().col_sums for b in fam["double"]} == {(-4, 2, 2)}

    def test_b2_family(self):
        fam = b2_family(10, 1, 0)
        assert [b.tolist() for b in fam["B0"]] == [[[-20, 12, 8], [16, -10, -6]], [[14, -9, -5], [-18, 11, 7]]]
        assert fam.support() == set(range(5, 13)) | {14, 16, 18, 20}
        shifted = b2_family(10, 1, 1)
        assert len(shifted["B1"]) == 2 and not shifted["B0"]
        assert {b.profile().row_sums for b in shifted["B1"]} == {(2, -2)}
        with pytest.raises(InvalidParameters):
            b2_family(9, 1, 0)
        with pytest.raises(InvalidParameters):
            b2_family(30, 1, 2)

    def test_b3_family(self):
        fam = b3_family(0)
        assert len(fam["I"]) == 12 and len(fam["II"]) == 0
        assert fam["I"][0].tolist() == [[37, 107, -144], [-39, -106, 145]]
        fam = b3_family(1)
        assert len(fam["I"]) == 26 and len(fam["II"]) == 2
        assert {b.profile().row_sums for b in fam["II"]} == {(-1, 1)}

    def test_b4_family(self):
        fam = b4_family(1, 1, 5)
        assert [b.tolist() for b in fam] == [[[1, 6, -7], [-3, -5, 8]]]
        assert fam.support() == {1, 3, 5, 6, 7, 8}
        fam = b4_family(3, 7, 30)
        assert len(fam) == 4
        assert {b.profile().col_sums for b in fam} == {(-2, 1, 1)}
        with pytest.raises(InvalidParameters):
            b4_family(2, 1, 10)
        with pytest.raises(InvalidParameters):
            b4_family(1, 1, 3)


@given(
    st.sampled_from(["a_alpha", "a2", "a3", "b_family", "b2_family", "b3_family", "b4_family"]),
    st.integers(0, 10**6),
)
@settings(max_examples=80, deadline=None)
def test_families_match_declared_contracts(name, seed):
    from intheffter.oracle import LEMMA_FAMILIES

    spec = LEMMA_FAMILIES[name]
    params = spec.sample(random.Random(seed))
    fam = spec.build(*params)
    assert fam.mismatches() == []


class TestTemplates:
    @pytest.mark.parametrize("name", ["P1", "P2", "P3", "Q1", "Q2", "R1"])
    def test_zero_sum_templates(self, name):
        rng = random.Random(name)
        for _ in range(25):
            p = random_template_params(name, rng)
            b = instantiate_template(name, p)
            assert b.profile().is_zero()
            assert b.support() == p.pieces()

    def test_l_profile(self):
        b = instantiate_template("L", TemplateParams(y=(0, 4), z=(8,)))
        assert b.profile() == SumProfile((2, 0, 1, 3), (2, 0, 1, 3))

    def test_m6_profile(self):
        b = instantiate_template("M6", TemplateParams(y=tuple(range(0, 36, 4))))
        assert b.profile() == SumProfile((0, 0, 2, 1, 1, 2), (0, 0, 0, 2, 2, 2))

    def test_z4star_columns_vanish(self):
        b = instantiate_template("Z4STAR", TemplateParams(y=(0, 4, 8, 12)))
        assert b.profile().col_sums == (0, 0, 0, 0)

    def test_p2_uncorrected_fails(self):
        p = random_template_params("P2", random.Random(7))
        with pytest.raises(ConstructionError):
            check_template("P2", p2_uncorrected(p), p)
        grid = p2_uncorrected(p)
        assert sum(grid[1]) != 0
        assert instantiate_template("P2", p).profile().is_zero()

    def test_r1_literal(self):
        grid = template_grid("R1", TemplateParams(x=(0,), y=(8,), z=(12,)))
        assert grid[0] == [2, -6, 20, -16]
        assert Block(grid).profile().is_zero()

    def test_q1_consumes_its_pieces(self):
        assert TEMPLATE_ARITY["Q1"] == (0, 1, 3, 1)

    def test_arity_mismatch(self):
        with pytest.raises(InvalidParameters):
            instantiate_template("R1", TemplateParams(y=(0,)))
        with pytest.raises(InvalidParameters):
            instantiate_template("NOPE", TemplateParams())


class TestTiling:
    def test_four_set_block_examples(self):
        assert four_set_block(FourSet(1, 1)).tolist() == [[-1, 2], [3, -4]]
        assert four_set_block(FourSet(6, 2)).tolist() == [[-6, 8], [10, -12]]
        with pytest.raises(InvalidParameters):
            four_set_block(FourSet(4, 4))

    @given(st.integers(1, 10**5), st.sampled_from([1, 2]))
    def test_four_set_block_profiles(self, start, d):
        p = four_set_block(FourSet(start, d)).profile()
        assert p == SumProfile((d, -d), (2 * d, -2 * d))

    def test_solvers(self):
        assert solve_pqr(1, 1, 1) == (0, 0, 1)
        assert solve_pqr(0, 5, 2) == (0, 0, 0)
        assert solve_uvxy(3, 0) == (1, 0, 0, 0)
        with pytest.raises(InvalidParameters):
            solve_uvxy(1, 0)

    def test_r_type_example(self):
        cs, ds = tile_blocks([FourSet(1, 1), FourSet(5, 1)], [FourSet(10, 2), FourSet(18, 2)], 1, 0)
        assert ds == []
        assert cs[0].tolist() == [[-1, 2, 5, -6], [3, -4, -7, 8], [10, -14, -18, 22], [-12, 16, 20, -24]]

    def test_empty(self):
        assert tile_blocks([], [], 0, 0) == ([], [])

    def test_u_type_example(self):
        t1 = [FourSet(1 + 4 * i, 1) for i in range(6)]
        cs, ds = tile_blocks(t1, [], 0, 1)
        assert cs == [] and len(ds) == 1
        assert ds[0].entries.shape == (6, 4) and ds[0].profile().is_zero()

    def test_infeasible_rejected(self):
        with pytest.raises(InvalidParameters):
            tile_blocks([FourSet(1, 1), FourSet(5, 1)], [], 1, 0)
        with pytest.raises(InvalidParameters):
            tile_blocks([FourSet(1, 1)], [], 0, 0)

    @given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_random_pools(self, alpha, beta, seed):
        rng = random.Random(seed)
        total = 2 * alpha + 3 * beta
        gamma = rng.randint(0, total)
        t1, t2 = disjoint_pool(rng, 2 * gamma, 2 * (total - gamma))
        cs, ds = tile_blocks(t1, t2, alpha, beta)
        assert len(cs) == alpha and len(ds) == beta
        assert all(b.profile().is_zero() for b in cs + ds)
        assert support_of(cs + ds) == {v for f in t1 + t2 for v in f.elements}


class TestSpecials:
    def test_c3_77(self):
        mats = special_matrices("c3_77")
        assert mats["A1"].tolist() == [[11, -14, 3], [-12, 5, 7], [1, 9, -10]]

    def test_atilde(self):
        at = special_matrices("c3_general", 0)["Atilde"]
        assert at.tolist() == [[38, -64, 30], [-62, 32, 34], [28, 36, -66]]
        assert at.profile() == SumProfile((4, 4, -2), (4, 4, -2))

    def test_c1_general(self):
        a5 = special_matrices("c1_general", 1)["A5"]
        assert a5.entries[0, 0] == 40
        assert a5.profile().is_zero() and a5.entries.shape == (5, 3)

    def test_c_pair_block(self):
        c = c_pair_block(1, 9)
        assert c.tolist() == [[1, -5, -9, 13], [-3, 7, 11, -15]]
        assert c.profile().row_sums == (0, 0)
        with pytest.raises(InvalidParameters):
            c_pair_block(1, 3)

    @pytest.mark.parametrize("j", [0, 1, 5])
    def test_d_block(self, j):
        beta = 400
        d = d_block(j, beta)
        assert d.profile().is_zero()
        assert d.support() == set(range(16 * j + 4, 16 * j + 17, 4)) | set(range(beta + 12 * j + 1, beta + 12 * j + 13))
