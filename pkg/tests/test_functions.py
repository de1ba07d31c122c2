import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncorlicz.errors import (BracketOverflowError, InvalidFunctionError, InvalidInputError,
                             InvalidParameterError)
from ncorlicz.functions import (GridFunction, GridSpec, OrliczFunction, conjugate,
                                delta2_probe, dyadic_indices, index_alpha, index_beta,
                                intermediate, inverse, parse_phi, power_function, validate)


def brute_conjugate(phi, y, x_max=1e3, n=400_001):
    """Independent oracle: sup of x*y - phi(x) over a dense uniform x grid."""
    x = np.linspace(0.0, x_max, n)
    return np.max(np.outer(y, x) - phi(x)[None, :], axis=1)


class TestPower:
    def test_values_and_inverse(self):
        phi = power_function(2.5)
        u = np.array([0.0, 0.3, 1.0, 7.0])
        np.testing.assert_allclose(phi(u), u ** 2.5)
        np.testing.assert_allclose(inverse(phi, phi(u)), u, rtol=1e-14)
        assert phi.power == 2.5 and phi.label == "power:2.5"

    @pytest.mark.parametrize("p", [0.5, -1.0, math.inf, math.nan])
    def test_rejects_bad_exponent(self, p):
        with pytest.raises(InvalidParameterError):
            power_function(p)

    def test_inverse_without_hint_uses_bisection(self):
        phi = power_function(3.0)
        bare = OrliczFunction("cube", phi.eval)
        v = np.geomspace(1e-9, 1e9, 25)
        np.testing.assert_allclose(inverse(bare, v), np.cbrt(v), rtol=1e-11)
        assert inverse(bare, 0.0) == 0.0

    def test_inverse_rejects_negative(self):
        with pytest.raises(InvalidParameterError):
            inverse(power_function(2), -1.0)

    def test_numeric_derivative_fallback(self):
        bare = OrliczFunction("sq", lambda u: np.asarray(u) ** 2)
        assert bare.deriv(3.0) == pytest.approx(6.0, rel=1e-6)


class TestGrid:
    def test_linear_interpolation_and_tail(self):
        g = GridFunction([0, 1, 2], [0, 1, 3])
        np.testing.assert_allclose(g([0.5, 1.5, 3.0]), [0.5, 2.0, 5.0])
        assert g.is_convex()
        np.testing.assert_allclose(g.inverse([0.5, 2.0, 5.0]), [0.5, 1.5, 3.0])

    def test_loglog_reproduces_power(self):
        x = np.concatenate([[0.0], np.geomspace(0.01, 10, 30)])
        g = GridFunction(x, x ** 1.7, "loglog")
        u = np.geomspace(1e-4, 1e3, 50)
        np.testing.assert_allclose(g(u), u ** 1.7, rtol=1e-12)
        np.testing.assert_allclose(g.deriv(u), 1.7 * u ** 0.7, rtol=1e-12)

    @pytest.mark.parametrize("nodes, values, err", [
        ([0, 2, 1], [0, 1, 2], InvalidFunctionError),
        ([0, 1, 2], [0, 2, 1], InvalidFunctionError),
        ([1, 2, 3], [0, 1, 2], InvalidFunctionError),
        ([0, 1], [0, np.inf], InvalidFunctionError),
        ([0], [0], InvalidInputError),
    ])
    def test_validation(self, nodes, values, err):
        with pytest.raises(err):
            GridFunction(nodes, values)

    def test_csv_roundtrip(self, tmp_path):
        g = GridFunction([0.0, 0.5, 1.0, 2.0], [0.0, 0.25, 1.0, 4.0])
        path = tmp_path / "phi.csv"
        g.to_csv(path)
        back = GridFunction.from_csv(path)
        np.testing.assert_array_equal(back.nodes, g.nodes)
        np.testing.assert_array_equal(back.values, g.values)

    def test_csv_without_origin_row(self, tmp_path):
        path = tmp_path / "phi.csv"
        path.write_text("u,phi\n1,1\n2,4\n")
        assert GridFunction.from_csv(path).nodes[0] == 0.0

    @pytest.mark.parametrize("text", ["x,y\n0,0\n", "u,phi\n0,a\n", "u,phi\n0,0,1\n"])
    def test_malformed_csv(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(InvalidInputError):
            GridFunction.from_csv(path)

    def test_parse_phi(self, tmp_path):
        assert parse_phi("power:3").power == 3.0
        path = tmp_path / "g.csv"
        path.write_text("u,phi\n0,0\n1,1\n2,4\n")
        g = parse_phi(f"grid:{path}")
        assert g(1.5) == pytest.approx(2.5)
        for bad in ["power", "power:x", "cosh:1"]:
            with pytest.raises(InvalidInputError):
                parse_phi(bad)

    def test_grid_spec(self):
        with pytest.raises(InvalidParameterError):
            GridSpec(1.0, 0.5)
        assert GridSpec(1e-2, 1e2, 5).points()[2] == pytest.approx(1.0)


class TestConjugate:
    @pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 3.0, 4.0])
    def test_power_closed_form(self, p):
        psi = conjugate(power_function(p))
        q = p / (p - 1)
        y = np.geomspace(1e-6, 1e3, 60)
        np.testing.assert_allclose(psi(y), (p - 1) * (y / p) ** q, rtol=1e-9)

    def test_half_square_is_self_conjugate(self):
        half = OrliczFunction("half-square", lambda u: 0.5 * np.asarray(u) ** 2,
                              lambda t: np.asarray(t))
        psi = conjugate(half)
        assert psi(1.0) == pytest.approx(0.5, rel=1e-12)
        np.testing.assert_allclose(psi([0.1, 2.0, 5.0]), [0.005, 2.0, 12.5], rtol=1e-9)

    @staticmethod
    def _cosh():
        # cosh(u) - 1 written without cancellation near zero
        return OrliczFunction("cosh-1", lambda u: 2.0 * np.sinh(np.asarray(u) / 2.0) ** 2,
                              lambda t: np.sinh(np.asarray(t)))

    def test_against_brute_force_sup(self):
        psi = conjugate(self._cosh())
        nodes = psi.params["grid"].nodes
        y = nodes[np.searchsorted(nodes, [0.05, 0.5, 1.0, 3.0, 10.0])]
        brute = brute_conjugate(self._cosh(), y, x_max=5.0)
        # the brute-force value is a lower bound; the solver may only beat it slightly
        assert np.all(psi(y) >= brute - 1e-12)
        np.testing.assert_allclose(psi(y), brute, rtol=1e-8)

    def test_against_closed_form(self):
        psi = conjugate(self._cosh())
        nodes = psi.params["grid"].nodes[1:]

        def exact(y):
            return y * np.arcsinh(y) - y * y / (np.sqrt(1 + y * y) + 1)

        np.testing.assert_allclose(psi(nodes), exact(nodes), rtol=1e-12)
        between = np.geomspace(1e-6, 1e3, 777)
        np.testing.assert_allclose(psi(between), exact(between), rtol=1e-5)

    def test_young_inequality(self, rng):
        phi = power_function(2.7)
        psi = conjugate(phi)
        x = rng.exponential(size=500)
        y = rng.exponential(size=500)
        assert np.all(x * y <= phi(x) + psi(y) + 1e-12)
        # equality when y is the derivative of phi at x
        np.testing.assert_allclose(x * phi.deriv(x), phi(x) + psi(phi.deriv(x)), rtol=1e-9)

    def test_linear_phi_has_infinite_conjugate(self):
        with pytest.raises(BracketOverflowError):
            conjugate(power_function(1.0))

    def test_conjugate_is_valid(self):
        assert validate(conjugate(power_function(3.0))) == []


class TestIntermediate:
    @pytest.mark.parametrize("a, b, s", [(1.5, 2.0, 0.3), (1.2, 2.0, 0.7), (3.0, 2.0, 0.5)])
    @pytest.mark.parametrize("exact", [False, True])
    def test_power_endpoints(self, a, b, s, exact):
        ps = 1.0 / ((1 - s) / a + s / b)
        f = intermediate(power_function(a), power_function(b), s, exact=exact)
        u = np.geomspace(0.01, 10, 40)
        np.testing.assert_allclose(f(u), u ** ps, rtol=1e-9)
        np.testing.assert_allclose(inverse(f, u ** ps), u, rtol=1e-12)

    def test_endpoints_s0_s1(self):
        u = np.geomspace(0.01, 10, 20)
        f0 = intermediate(power_function(1.5), power_function(2.0), 0.0)
        f1 = intermediate(power_function(1.5), power_function(2.0), 1.0)
        np.testing.assert_allclose(f0(u), u ** 1.5, rtol=1e-12)
        np.testing.assert_allclose(f1(u), u ** 2, rtol=1e-12)

    def test_rejects_s_outside_unit_interval(self):
        with pytest.raises(InvalidParameterError):
            intermediate(power_function(2), power_function(3), 1.5)

    def test_is_valid_orlicz_function(self):
        f = intermediate(power_function(1.3), power_function(2.0), 0.4)
        assert validate(f) == []


class TestIndices:
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
    def test_power(self, p):
        est = dyadic_indices(power_function(p))
        assert est.converged
        assert est.alpha == pytest.approx(2 ** (-1 / p), abs=1e-12)
        assert index_beta(power_function(p)) == pytest.approx(2 ** (-1 / p), abs=1e-12)

    def test_alpha_le_beta_for_mixed_function(self):
        phi = OrliczFunction("mix", lambda u: np.asarray(u) ** 2 * (1 + np.log1p(np.asarray(u))))
        assert index_alpha(phi) <= index_beta(phi)

    def test_delta2(self):
        assert delta2_probe(power_function(2.5), 3.0) == pytest.approx(2 ** 2.5)
        with pytest.raises(InvalidParameterError):
            delta2_probe(power_function(2), 0.0)


class TestValidate:
    def test_detects_concavity(self):
        sqrt = OrliczFunction("sqrt", lambda u: np.sqrt(np.abs(np.asarray(u))))
        assert "phi is not midpoint convex" in validate(sqrt)

    def test_detects_nonzero_origin(self):
        shifted = OrliczFunction("shift", lambda u: np.asarray(u) ** 2 + 1.0)
        assert "phi(0) != 0" in validate(shifted)

    def test_power_is_clean(self):
        assert validate(power_function(1.0)) == []


@settings(max_examples=40, deadline=None)
@given(p=st.floats(1.05, 6.0), y=st.floats(1e-3, 1e2))
def test_conjugate_closed_form_property(p, y):
    psi = conjugate(power_function(p))
    q = p / (p - 1)
    assert float(psi(y)) == pytest.approx((p - 1) * (y / p) ** q, rel=1e-8)
