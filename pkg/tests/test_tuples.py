import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncorlicz.errors import DimensionMismatchError, InvalidInputError, InvalidParameterError
from ncorlicz.functions import power_function
from ncorlicz.norms import luxemburg_norm, orlicz_norm
from ncorlicz.tuples import (OperatorPair, TupleSpaceSpec, check_delta2_triangle,
                             check_holder, check_ideal, check_thm21, conjugate_spec,
                             dual_norm_estimate, tuple_luxemburg_norm, tuple_orlicz_norm,
                             upsilon, upsilon_abs_product, young_witness)

P2 = power_function(2)
P3 = power_function(3)


def diag(*v):
    return np.diag(np.array(v, dtype=float))


def random_pairs(rng, n, dim=4):
    return OperatorPair(rng.normal(size=(n, dim, dim)), rng.normal(size=(n, dim, dim)))


class TestUpsilon:
    def test_raw_trace(self):
        assert upsilon(OperatorPair(diag(1), diag(2))) == 3.0

    def test_zero_pair(self):
        Z = OperatorPair(np.zeros((2, 2)), np.zeros((3, 3)))
        assert upsilon(Z) == 0.0
        assert upsilon(Z, (P2, P3)) == 0.0

    def test_raw_mode_rejects_non_positive(self):
        with pytest.raises(InvalidInputError):
            upsilon(OperatorPair(diag(1, -1), diag(1)))
        with pytest.raises(InvalidInputError):
            upsilon(OperatorPair(np.array([[0.0, 1.0], [0.0, 0.0]]), diag(1)))

    def test_corollary_normalized_power_trace(self, rng):
        spec = TupleSpaceSpec(P3, P3, 3)
        for _ in range(20):
            T = OperatorPair(np.diag(rng.uniform(0, 2, 3)), np.diag(rng.uniform(0, 2, 4)))
            n = tuple_luxemburg_norm(spec, T)
            Tp = OperatorPair(T.t1 ** 3 / n ** 3, T.t2 ** 3 / n ** 3)
            assert upsilon(Tp) == pytest.approx(1.0, abs=1e-12)

    def test_abs_product_dimension_check(self):
        with pytest.raises(DimensionMismatchError):
            upsilon_abs_product(OperatorPair(diag(1), diag(1)), OperatorPair(diag(1, 1), diag(1)))


class TestNorms:
    def test_second_slot_zero_reduces(self, rng):
        A = rng.normal(size=(4, 4))
        T = OperatorPair(A, np.zeros((2, 2)))
        assert tuple_luxemburg_norm(TupleSpaceSpec(P3, P2, 2), T) == pytest.approx(
            luxemburg_norm(P3, A).value, rel=1e-12)
        assert tuple_orlicz_norm(TupleSpaceSpec(P3, P2, 2), T) == pytest.approx(
            orlicz_norm(P3, A).value, rel=1e-12)

    def test_power_slots(self):
        T = OperatorPair(diag(3, 4), diag(1, 2))
        expected = (25 + 5) ** 0.5
        assert tuple_luxemburg_norm(TupleSpaceSpec(P2, P2, 2), T) == pytest.approx(expected)

    def test_max_aggregation(self):
        T = OperatorPair(diag(2), diag(3))
        assert tuple_luxemburg_norm(TupleSpaceSpec(P2, P2, math.inf), T) == pytest.approx(3)

    def test_zero_pair(self):
        Z = OperatorPair(np.zeros((2, 2)), np.zeros((2, 2)))
        assert tuple_orlicz_norm(TupleSpaceSpec(P2, P3, 1), Z) == 0.0

    def test_spec_validation(self):
        with pytest.raises(InvalidParameterError):
            TupleSpaceSpec(P2, P2, 0.5)
        assert TupleSpaceSpec(P2, P2, 1).q == math.inf
        assert TupleSpaceSpec(P2, P2, math.inf).q == 1.0
        assert TupleSpaceSpec(P2, P2, 3).q == pytest.approx(1.5)

    def test_conjugate_spec(self):
        cs = conjugate_spec(TupleSpaceSpec(P2, P3, 3))
        assert cs.p == pytest.approx(1.5)
        assert float(cs.phi1(2.0)) == pytest.approx(1.0)

    def test_relation_between_norms(self, rng):
        spec = TupleSpaceSpec(P2, P3, 2)
        T = random_pairs(rng, 100)
        lux = tuple_luxemburg_norm(spec, T)
        orl = tuple_orlicz_norm(spec, T)
        assert np.all(lux <= orl * (1 + 1e-12)) and np.all(orl <= 2 * lux + 1e-8)

    def test_batch_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            OperatorPair(np.zeros((2, 3, 3)), np.zeros((3, 3, 3)))

    def test_json_roundtrip(self, rng):
        T = OperatorPair(rng.normal(size=(2, 2)), rng.normal(size=(3, 3)))
        back = OperatorPair.from_json(T.to_json())
        np.testing.assert_array_equal(back.t1, T.t1)
        with pytest.raises(InvalidInputError):
            OperatorPair.from_json({"t1": [[1]]})


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), c=st.floats(1e-2, 1e2), p=st.sampled_from([1.0, 2.0, 3.5]))
def test_tuple_norm_axioms(seed, c, p):
    r = np.random.default_rng(seed)
    spec = TupleSpaceSpec(P2, P3, p)
    T, B = random_pairs(r, 1)[0], random_pairs(r, 1)[0]
    n = lambda X: tuple_luxemburg_norm(spec, X)  # noqa: E731
    assert n(T.scaled(c)) == pytest.approx(c * n(T), rel=1e-9)
    assert n(T + B) <= n(T) + n(B) + 1e-9


class TestThm21:
    def test_small_slots_part1(self):
        rep = check_thm21(TupleSpaceSpec(P2, P2, 2), OperatorPair(diag(0.5), diag(0.5)))
        assert rep["thm2.1(1)"].status == "pass" and rep["thm2.1(1)"].gap > 0
        assert rep["thm2.1(2)"].status == "skipped"

    def test_large_slots_part2(self):
        rep = check_thm21(TupleSpaceSpec(P2, P2, 2), OperatorPair(diag(3), diag(3)))
        rec = rep["thm2.1(2)"]
        assert rec.status == "pass"
        assert rec.gap == pytest.approx(18 - 3 * math.sqrt(2))
        assert rec.detail["strict_gaps"] == 1
        assert rep["thm2.1(1)"].status == "skipped"

    def test_part5_at_p1(self, rng):
        rep = check_thm21(TupleSpaceSpec(P2, P3, 1), random_pairs(rng, 50))
        rec = rep["thm2.1(5)"]
        assert rec.status == "pass" and rec.gap >= -1e-12

    def test_random(self, rng):
        rep = check_thm21(TupleSpaceSpec(P2, P3, 3), random_pairs(rng, 300))
        assert rep.ok

    def test_infinite_p_rejected(self):
        with pytest.raises(InvalidParameterError):
            check_thm21(TupleSpaceSpec(P2, P2, math.inf), OperatorPair(diag(1), diag(1)))


class TestHolder:
    def test_zero_b_is_equality(self):
        T = OperatorPair(diag(1, 2), diag(3))
        B = OperatorPair(np.zeros((2, 2)), np.zeros((1, 1)))
        rep = check_holder(TupleSpaceSpec(P2, P2, 2), T, B)
        for rec in rep.records:
            assert rec.gap == pytest.approx(0.0, abs=1e-15)

    def test_random_dense_p3(self, rng):
        rep = check_holder(TupleSpaceSpec(P3, P3, 3), random_pairs(rng, 300), random_pairs(rng, 300))
        assert rep.ok
        assert "cor2.1(3) schatten holder" in [r.name for r in rep.records]

    @pytest.mark.parametrize("phis, p", [((P2, P2), 2.0), ((P2, P3), 2.0), ((P3, power_function(1.5)), 3.0)])
    def test_young_witness_is_near_tight(self, rng, phis, p):
        spec = TupleSpaceSpec(*phis, p)
        psi = conjugate_spec(spec)
        for _ in range(5):
            T = OperatorPair(np.diag(rng.uniform(0.1, 2, 3)), np.diag(rng.uniform(0.1, 2, 3)))
            B, value = young_witness(spec, T, 0.0, psi)
            rep = check_holder(spec, T, B, psi_spec=psi)
            assert rep.ok
            norm = tuple_luxemburg_norm(spec, T)
            assert (norm - value) / norm <= 1e-3
            assert upsilon_abs_product(T, B) == pytest.approx(value, rel=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            check_holder(TupleSpaceSpec(P2, P2, 2), OperatorPair(diag(1), diag(1)),
                         OperatorPair(diag(1, 1), diag(1)))


class TestDelta2:
    def test_power_constant(self, rng):
        spec = TupleSpaceSpec(P3, P3, 2)
        T = OperatorPair(np.abs(rng.normal(size=(3, 3))), np.abs(rng.normal(size=(3, 3))))
        rep = check_delta2_triangle(spec, T, T)
        assert rep.records[0].detail["k"] == pytest.approx(8.0)
        assert rep["cor2.1(2) constant"].status == "pass"
        # B = T: |2T|^3 = 8|T|^3 and (k/2)(2 upsilon) = 8 upsilon, so equality
        assert rep["thm2.1(4)"].gap == pytest.approx(0.0, abs=1e-10)

    def test_b_equals_minus_t(self, rng):
        spec = TupleSpaceSpec(P2, P3, 2)
        T = random_pairs(rng, 1)[0]
        rep = check_delta2_triangle(spec, T, -T)
        mod = upsilon(T, (P2, P3))
        assert rep["thm2.1(4)"].gap == pytest.approx(rep.records[0].detail["k"] * mod)

    def test_linear_phi_equality(self):
        P1 = power_function(1)
        T = OperatorPair(diag(1, 2), diag(3))
        rep = check_delta2_triangle(TupleSpaceSpec(P1, P1, 1), T, T, 2.0, 2.0)
        assert rep["thm2.1(4)"].gap == pytest.approx(0.0, abs=1e-12)


class TestIdeal:
    def test_identity_sandwich_is_equality(self, rng):
        T = random_pairs(rng, 1)[0]
        I = OperatorPair(np.eye(4), np.eye(4))
        rep = check_ideal(TupleSpaceSpec(P2, P3, 2), T, I, I)
        for rec in rep.records:
            assert rec.gap == pytest.approx(0.0, abs=1e-12)

    def test_contraction_shrinks(self, rng):
        spec = TupleSpaceSpec(P2, P3, 2)
        T = random_pairs(rng, 1)[0]
        C = OperatorPair(np.diag(rng.uniform(0, 1, 4)), np.diag(rng.uniform(0, 1, 4)))
        I = OperatorPair(np.eye(4), np.eye(4))
        rep = check_ideal(spec, T, C, I)
        assert rep.ok and rep["thm2.2 B~TC~"].gap > 0

    def test_random(self, rng):
        rep = check_ideal(TupleSpaceSpec(P3, P2, 1.5), random_pairs(rng, 200, 3),
                          random_pairs(rng, 200, 3), random_pairs(rng, 200, 3))
        assert rep.ok

    def test_dimension_mismatch(self):
        T = OperatorPair(np.eye(2), np.eye(2))
        with pytest.raises(DimensionMismatchError):
            check_ideal(TupleSpaceSpec(P2, P2, 2), T, OperatorPair(np.eye(3), np.eye(3)), T)


class TestDual:
    def test_zero(self):
        Z = OperatorPair(np.zeros((2, 2)), np.zeros((2, 2)))
        assert dual_norm_estimate(TupleSpaceSpec(P2, P3, 2), Z, budget=100) == 0.0

    def test_bounds_and_determinism(self, rng):
        spec = TupleSpaceSpec(P2, P3, 2)
        psi = conjugate_spec(spec)
        T = OperatorPair(np.diag(rng.uniform(0, 2, 3)), np.diag(rng.uniform(0, 2, 3)))
        est = dual_norm_estimate(spec, T, budget=2000, seed=5, psi_spec=psi)
        norm = tuple_luxemburg_norm(spec, T)
        assert est <= norm + 1e-9 and est >= 0.9 * norm
        assert est == dual_norm_estimate(spec, T, budget=2000, seed=5, psi_spec=psi)

    def test_random_candidates_alone_stay_feasible(self, rng):
        spec = TupleSpaceSpec(P3, P2, 3)
        psi = conjugate_spec(spec)
        T = random_pairs(rng, 1)[0]
        est = dual_norm_estimate(spec, T, budget=3000, seed=1, psi_spec=psi, eps=())
        assert est <= tuple_luxemburg_norm(spec, T) + 1e-9

    def test_requires_finite_p_and_single_pair(self, rng):
        with pytest.raises(InvalidParameterError):
            dual_norm_estimate(TupleSpaceSpec(P2, P2, math.inf), OperatorPair(diag(1), diag(1)))
        with pytest.raises(InvalidInputError):
            dual_norm_estimate(TupleSpaceSpec(P2, P2, 2), random_pairs(rng, 2))
