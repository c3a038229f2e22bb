import math

import numpy as np
import pytest

from dfweno.recon import (
    GAUSS_C,
    GAUSS_OFFSETS,
    ReconConfig,
    StencilValues,
    df_cell_product,
    df_cubic_point,
    df_cubic_reconstruct,
    df_factor,
    hybrid_select,
    reconstruct_gauss_points,
    reconstruct_interface_line,
    stencil_smoothness,
    van_leer_reconstruct,
    vanleer_prim_point,
    vanleer_slope,
    weno_ao_point,
    weno_ao_reconstruct,
)
from dfweno.state import ConservedState, GammaModel, PrimitiveState

from oracles import (
    gauss_legendre_average,
    local_stencil_averages,
    poly_deriv_eval,
    poly_eval,
)

GM = GammaModel(1.4)
CFG = ReconConfig()


class TestGaussPoints:
    def test_location_constant(self):
        assert GAUSS_C == pytest.approx(0.5 + math.sqrt(3) / 6, abs=1e-16)
        assert GAUSS_C == pytest.approx(0.7886751345948129, abs=1e-15)

    def test_offsets_symmetric_about_cell_center(self):
        u1, u2 = GAUSS_OFFSETS
        assert u1 + u2 == pytest.approx(-1.0, abs=1e-15)

    def test_midpoint_rule_exact_for_linear(self):
        # the two-point average reproduces the cell mean of any linear field
        u1, u2 = GAUSS_OFFSETS
        for a, b in [(1.0, 2.0), (-0.3, 0.7)]:
            avg = 0.5 * ((a + b * u1) + (a + b * u2))
            assert avg == pytest.approx(a - 0.5 * b, abs=1e-14)


class TestSmoothness:
    def test_constant_data_all_zero(self):
        b0, b1, b2, b3, tz = stencil_smoothness(3.0, 3.0, 3.0, 3.0, 3.0)
        assert b0 == b1 == b2 == b3 == 0.0
        assert tz == 0.0

    def test_linear_data_centered_beta(self):
        dx = 0.1
        q = [j * dx for j in range(-2, 3)]
        b0, b1, b2, b3, tz = stencil_smoothness(*q)
        assert b1 == pytest.approx(dx * dx, rel=1e-13)

    def test_matches_quadrature_definition(self):
        # beta_k = sum_q dx^(2q-1) * int_cell (d^q p_k / dx^q)^2 dx, checked
        # by quadrature for the quartic candidate on random data
        rng = np.random.default_rng(21)
        for _ in range(50):
            q = rng.normal(size=5)
            _, _, _, b3, _ = stencil_smoothness(*q)
            # quartic through the averages, in scaled coordinates
            A = np.zeros((5, 5))
            for row, k in enumerate(range(-2, 3)):
                a, b = k - 1.0, float(k)
                for n in range(5):
                    A[row, n] = (b ** (n + 1) - a ** (n + 1)) / (n + 1) / (b - a)
            coef = np.linalg.solve(A, q)

            def deriv(c, order):
                out = list(c)
                for _ in range(order):
                    out = [n * out[n] for n in range(1, len(out))]
                return out

            ref = 0.0
            for order in range(1, 5):
                dc = deriv(coef, order)
                ref += gauss_legendre_average(
                    lambda x: np.array([poly_eval(dc, xi) ** 2 for xi in x]),
                    -1.0, 0.0, n=16)
            assert b3 == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_reflection_invariance(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            q = rng.normal(size=5)
            f = stencil_smoothness(*q)
            r = stencil_smoothness(*q[::-1])
            assert f[0] == pytest.approx(r[2], rel=1e-13, abs=1e-14)
            assert f[1] == pytest.approx(r[1], rel=1e-13, abs=1e-14)
            assert f[3] == pytest.approx(r[3], rel=1e-12, abs=1e-14)


class TestWenoAo:
    def test_linear_weights_recovered_on_constant_data(self):
        val, der, b0, b1, b2, b3, tz = weno_ao_point(3.0, 3.0, 3.0, 3.0, 3.0,
                                                     0.85, 0.85, 1e-6, 0.0)
        assert val == pytest.approx(3.0, abs=1e-14)
        assert der == pytest.approx(0.0, abs=1e-14)
        assert tz == 0.0

    def test_linear_weight_split(self):
        d3 = 0.85
        d1 = (1 - 0.85) * 0.85
        d0 = d2 = (1 - 0.85) * (1 - 0.85) / 2
        assert d3 + d1 + d0 + d2 == pytest.approx(1.0, abs=1e-15)
        assert d1 == pytest.approx(0.1275, abs=1e-15)
        assert d0 == pytest.approx(0.01125, abs=1e-15)

    @pytest.mark.parametrize("deg", [0, 1, 2, 3, 4])
    def test_exact_on_polynomials(self, deg):
        # cell averages of any degree<=4 polynomial reproduce interface value
        # and derivative
        rng = np.random.default_rng(23 + deg)
        dx = 0.02
        for _ in range(25):
            coeffs = rng.uniform(-2, 2, deg + 1)
            coeffs[0] += 3.0  # keep data O(1)
            q = local_stencil_averages(coeffs, dx)
            s = StencilValues(q, dx)
            res = weno_ao_reconstruct(s, CFG, x_eval=0.0)
            assert res.value == pytest.approx(poly_eval(coeffs, 0.0),
                                              rel=1e-12, abs=1e-10)
            assert res.deriv == pytest.approx(poly_deriv_eval(coeffs, 0.0),
                                              rel=1e-8, abs=1e-8)

    def test_exact_at_interior_points(self):
        rng = np.random.default_rng(29)
        dx = 0.02
        coeffs = rng.uniform(-1, 1, 5)
        q = local_stencil_averages(coeffs, dx)
        s = StencilValues(q, dx)
        for xf in (-0.25, -0.75):
            res = weno_ao_reconstruct(s, CFG, x_eval=xf * dx)
            assert res.value == pytest.approx(poly_eval(coeffs, xf * dx),
                                              rel=1e-11, abs=1e-11)

    def test_quartic_interface_value_reference(self):
        # the large-stencil candidate alone: c0 = (2,-13,47,27,-3)/60 dot q
        q = np.array([0.3, -0.2, 1.7, 0.9, -1.1])
        c0 = (2 * q[0] - 13 * q[1] + 47 * q[2] + 27 * q[3] - 3 * q[4]) / 60.0
        assert c0 == pytest.approx(np.dot([2, -13, 47, 27, -3], q) / 60, abs=1e-15)

    def test_eno_behavior_on_step(self):
        # smooth side is identically zero; the reconstruction must not pull
        # in more than a vanishing trace of the jump
        val, der, *_ = weno_ao_point(0.0, 0.0, 0.0, 1.0, 1.0,
                                     0.85, 0.85, 1e-6, 0.0)
        assert abs(val) < 1e-8

    def test_mirror_consistency(self):
        # reversing the stencil evaluates the mirrored polynomial: value at
        # -1-u matches, derivative flips sign
        rng = np.random.default_rng(31)
        for _ in range(50):
            q = rng.normal(size=5)
            u = rng.uniform(-1.0, 0.0)
            v1, d1, *_ = weno_ao_point(q[0], q[1], q[2], q[3], q[4],
                                       0.85, 0.85, 1e-6, u)
            v2, d2, *_ = weno_ao_point(q[4], q[3], q[2], q[1], q[0],
                                       0.85, 0.85, 1e-6, -1.0 - u)
            assert v1 == pytest.approx(v2, rel=1e-12, abs=1e-12)
            assert d1 == pytest.approx(-d2, rel=1e-12, abs=1e-12)

    def test_betas_forwarded(self):
        q = np.array([0.0, 0.1, 0.3, 0.9, 2.0])
        res = weno_ao_reconstruct(StencilValues(q, 0.5), CFG)
        ref = stencil_smoothness(*q)
        assert np.allclose(res.betas, ref[:4], rtol=1e-14)
        assert res.tau_z == pytest.approx(ref[4], rel=1e-14)


class TestDfCubic:
    def test_reference_value(self):
        val, der = df_cubic_reconstruct(1.0, 2.0, 3.0, 1.0, 1.0, 0.0)
        assert val == pytest.approx(2.5, abs=1e-14)
        assert der == pytest.approx(1.0, abs=1e-14)

    def test_alpha_zero_limit_returns_cell_average(self):
        val, der = df_cubic_point(1.0, 2.0, 3.0, 0.0, 0.0)
        assert val == 2.0
        assert der == 0.0

    def test_mean_preserved_for_any_alpha(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            qm, q0, qp = rng.normal(size=3)
            alpha = rng.uniform(0.0, 1.0)
            mean = gauss_legendre_average(
                lambda u: np.array([df_cubic_point(qm, q0, qp, alpha, ui)[0]
                                    for ui in u]), -1.0, 0.0, n=8)
            assert mean == pytest.approx(q0, rel=1e-12, abs=1e-12)

    def test_rejects_alpha_out_of_range(self):
        with pytest.raises(ValueError):
            df_cubic_reconstruct(1.0, 2.0, 3.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            df_cubic_reconstruct(1.0, 2.0, 3.0, 1.5, 1.0)


class TestVanLeer:
    def test_smooth_ramp(self):
        lo, hi, s = van_leer_reconstruct(1.0, 2.0, 3.0)
        assert s == pytest.approx(1.0, abs=1e-14)
        assert (lo, hi) == (pytest.approx(1.5), pytest.approx(2.5))

    def test_extremum_flattens(self):
        assert vanleer_slope(1.0, 3.0, 2.0) == 0.0
        assert vanleer_slope(2.0, 1.0, 3.0) == 0.0

    def test_bounded_by_one_sided_differences(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            qm, q0, qp = rng.normal(size=3)
            s = vanleer_slope(qm, q0, qp)
            assert abs(s) <= 2 * min(abs(q0 - qm), abs(qp - q0)) + 1e-14

    @staticmethod
    def _prim(w):
        rho = w[0]
        u = w[1] / rho
        v = w[2] / rho
        p = (GM.gamma - 1.0) * (w[3] - 0.5 * rho * (u * u + v * v))
        return rho, u, v, p

    @staticmethod
    def _cons(rho, u, v, p):
        return np.array([rho, rho * u, rho * v,
                         p / (GM.gamma - 1.0) + 0.5 * rho * (u * u + v * v)])

    def test_prim_point_matches_componentwise_reference(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            prims = rng.uniform(0.2, 3.0, size=(3, 4))
            prims[:, 1:3] = rng.normal(0.0, 1.5, size=(3, 2))
            wm, w0, wp = (self._cons(*q) for q in prims)
            u_eval = rng.uniform(-0.5, 0.5)
            val = np.empty(4)
            der = np.empty(4)
            vanleer_prim_point(wm, w0, wp, GM.gamma, u_eval, val, der)
            qm, q0, qp = (np.array(self._prim(w)) for w in (wm, w0, wp))
            s = np.array([vanleer_slope(qm[c], q0[c], qp[c]) for c in range(4)])
            q = q0 + s * u_eval
            assert np.allclose(val, self._cons(*q), rtol=1e-13)

    def test_prim_point_derivative_exact_on_linear_primitives(self):
        # primitives linear in the cell coordinate: the limiter passes the
        # common slope through and the conserved derivative is the chain
        # rule of the linear profile at the evaluation point
        base = np.array([1.2, 0.4, -0.3, 0.9])
        slope = np.array([0.3, -0.25, 0.15, 0.2])
        states = [self._cons(*(base + slope * du)) for du in (-1.0, 0.0, 1.0)]
        for u_eval in (-0.5, -0.2886751345948129, 0.2886751345948129, 0.5):
            val = np.empty(4)
            der = np.empty(4)
            vanleer_prim_point(states[0], states[1], states[2], GM.gamma,
                               u_eval, val, der)
            assert np.allclose(val, self._cons(*(base + slope * u_eval)),
                               rtol=1e-13)
            h = 1e-7
            lo = self._cons(*(base + slope * (u_eval - h)))
            hi = self._cons(*(base + slope * (u_eval + h)))
            assert np.allclose(der, (hi - lo) / (2 * h), rtol=1e-6)

    def test_prim_point_positive_across_strong_jumps(self):
        # opposed near-vacuum expansion triples must give physical edge
        # states at every evaluation offset used by the interface passes
        triples = [
            ((1.0, -20.0, 0.0, 1e-4), (1.0, 0.0, 0.0, 1e-4),
             (1.0, 20.0, 0.0, 1e-4)),
            ((1.0, -2.0, 0.0, 0.4), (0.02, 0.0, 0.0, 0.002),
             (1.0, 2.0, 0.0, 0.4)),
            ((8.0, 1.0, -1.0, 10.0), (1e-3, 0.0, 0.0, 1e-6),
             (8.0, -1.0, 1.0, 10.0)),
        ]
        val = np.empty(4)
        der = np.empty(4)
        for qm, q0, qp in triples:
            wm, w0, wp = self._cons(*qm), self._cons(*q0), self._cons(*qp)
            for u_eval in (-0.5, -0.2886751345948129, 0.2886751345948129, 0.5):
                vanleer_prim_point(wm, w0, wp, GM.gamma, u_eval, val, der)
                rho, u, v, p = self._prim(val)
                assert rho > 0.0 and p > 0.0


class TestDfFactor:
    def test_pressure_jump_reference(self):
        a = df_factor(PrimitiveState(1.0, 0.0, 0.0, 1.0),
                      PrimitiveState(1.0, 0.0, 0.0, 0.5), GM)
        # D = 0.5/1 + 0.5/0.5 = 1.5 -> alpha = 1/(1+2.25)
        assert a == pytest.approx(1.0 / 3.25, rel=1e-14)

    def test_equal_states_give_unity(self):
        st = PrimitiveState(1.2, 0.4, -0.3, 2.0)
        assert df_factor(st, st, GM) == pytest.approx(1.0, abs=1e-15)

    def test_range_and_monotone_in_jump(self):
        rng = np.random.default_rng(43)
        last = 1.0
        for pr in (1.0, 0.8, 0.5, 0.2, 0.05):
            a = df_factor(PrimitiveState(1, 0, 0, 1.0),
                          PrimitiveState(1, 0, 0, pr), GM)
            assert 0.0 < a <= 1.0
            assert a <= last + 1e-15
            last = a
        for _ in range(100):
            l = PrimitiveState(rng.uniform(0.1, 3), rng.uniform(-2, 2),
                               rng.uniform(-2, 2), rng.uniform(0.1, 3))
            r = PrimitiveState(rng.uniform(0.1, 3), rng.uniform(-2, 2),
                               rng.uniform(-2, 2), rng.uniform(0.1, 3))
            assert 0.0 < df_factor(l, r, GM) <= 1.0

    def test_cell_product(self):
        assert df_cell_product([0.5] * 8) == pytest.approx(0.5 ** 8, rel=1e-14)
        with pytest.raises(ValueError):
            df_cell_product([0.5, 1.5])


class TestHybridSelect:
    def test_fires_only_when_all_below(self):
        assert hybrid_select((0.1, 0.2, 0.3), 0.5)
        assert not hybrid_select((0.1, 0.7, 0.3), 0.5)

    def test_tie_goes_to_weno(self):
        assert not hybrid_select((0.2, 0.5, 0.2), 0.5)

    def test_zero_threshold_never_fires(self):
        rng = np.random.default_rng(44)
        for _ in range(100):
            tri = rng.uniform(1e-12, 1.0, 3)
            assert not hybrid_select(tri, 0.0)


def _smooth_window6(coeffs_by_comp, dx):
    """Conserved cell averages of four independent polynomials on the six
    cells straddling an interface (owning cells at indices 2 and 3)."""
    win = np.empty((6, 4))
    for c in range(4):
        for row, k in enumerate(range(-2, 4)):
            win[row, c] = sum(
                co * ((k * dx) ** (n + 1) - ((k - 1) * dx) ** (n + 1)) / (n + 1)
                for n, co in enumerate(coeffs_by_comp[c])) / dx
    return win


class TestInterfaceLine:
    def _physical_coeffs(self, rng, dx):
        # density quartic, constant velocity/pressure: every conserved
        # component is then a degree<=4 polynomial
        rho = [2.0] + list(rng.uniform(-0.5, 0.5, 4))
        u0, p0 = 0.7, 1.3
        gm = GM.gamma
        rho_u = [u0 * c for c in rho]
        rho_v = [0.0]
        E = [p0 / (gm - 1) + 0.5 * u0 * u0 * rho[0]] + [0.5 * u0 * u0 * c for c in rho[1:]]
        return [rho, rho_u, rho_v, E]

    def test_weno_mode_exact_on_smooth_field(self):
        rng = np.random.default_rng(51)
        dx = 0.05
        coeffs = self._physical_coeffs(rng, dx)
        win = _smooth_window6(coeffs, dx)
        lr = reconstruct_interface_line(win, (1.0, 1.0, 1.0), (1.0, 1.0, 1.0),
                                        CFG, "weno_ao", GM, "x", dx)
        for c in range(4):
            exact = poly_eval(coeffs[c], 0.0)
            dexact = poly_deriv_eval(coeffs[c], 0.0)
            assert lr.wl[c] == pytest.approx(exact, rel=1e-10, abs=1e-10)
            assert lr.wr[c] == pytest.approx(exact, rel=1e-10, abs=1e-10)
            assert lr.wxl[c] == pytest.approx(dexact, rel=1e-7, abs=1e-7)
            assert lr.wxr[c] == pytest.approx(dexact, rel=1e-7, abs=1e-7)

    def test_hybrid_fires_to_damped_quadratic(self):
        win = np.tile(np.array([1.0, 0.5, 0.0, 2.5]), (6, 1))
        win[3:, 0] = 2.0  # density jump across the interface
        win[3:, 3] = 5.0
        tri = (0.1, 0.2, 0.1)
        lr = reconstruct_interface_line(win, tri, tri, CFG, "hybrid", GM, "x", 0.1)
        # left side: damped quadratic on cells (1,2,3) with alpha=0.2
        v, d = df_cubic_point(win[1, 0], win[2, 0], win[3, 0], 0.2, 0.0)
        assert lr.wl[0] == pytest.approx(v, rel=1e-14)
        assert lr.wxl[0] == pytest.approx(d / 0.1, rel=1e-14)
        # right side mirrored: qm=win[4], q0=win[3], qp=win[2], deriv negated
        v, d = df_cubic_point(win[4, 0], win[3, 0], win[2, 0], 0.2, 0.0)
        assert lr.wr[0] == pytest.approx(v, rel=1e-14)
        assert lr.wxr[0] == pytest.approx(-d / 0.1, rel=1e-14)

    def test_hybrid_with_unit_alphas_matches_weno(self):
        rng = np.random.default_rng(52)
        dx = 0.05
        win = _smooth_window6(self._physical_coeffs(rng, dx), dx)
        ones = (1.0, 1.0, 1.0)
        a = reconstruct_interface_line(win, ones, ones, CFG, "weno_ao", GM, "x", dx)
        b = reconstruct_interface_line(win, ones, ones, CFG, "hybrid", GM, "x", dx)
        assert np.array_equal(a.wl, b.wl) and np.array_equal(a.wr, b.wr)
        assert np.array_equal(a.wxl, b.wxl) and np.array_equal(a.wxr, b.wxr)

    def test_van_leer_mode(self):
        win = np.tile(np.array([1.0, 0.2, 0.0, 2.0]), (6, 1))
        win[:, 0] = [1.0, 1.1, 1.3, 1.6, 2.0, 2.5]
        lr = reconstruct_interface_line(win, (1,) * 3, (1,) * 3, CFG,
                                        "van_leer", GM, "x", 0.1)
        s_l = vanleer_slope(1.1, 1.3, 1.6)
        s_r = vanleer_slope(1.3, 1.6, 2.0)
        assert lr.wl[0] == pytest.approx(1.3 + 0.5 * s_l, rel=1e-14)
        assert lr.wr[0] == pytest.approx(1.6 - 0.5 * s_r, rel=1e-14)
        # every component follows the per-primitive limited line
        val = np.empty(4)
        der = np.empty(4)
        vanleer_prim_point(win[1], win[2], win[3], GM.gamma, 0.5, val, der)
        assert np.allclose(lr.wl, val, rtol=1e-14)
        assert np.allclose(lr.wxl, der / 0.1, rtol=1e-14)
        vanleer_prim_point(win[4], win[3], win[2], GM.gamma, 0.5, val, der)
        assert np.allclose(lr.wr, val, rtol=1e-14)
        assert np.allclose(lr.wxr, -der / 0.1, rtol=1e-14)


class TestGaussPointPass:
    def test_constant_line_values_pass_through(self):
        line5 = np.tile(np.array([1.0, 0.5, 0.1, 2.5]), (5, 1))
        dline = np.array([0.3, 0.1, 0.0, -0.2])
        ref = (line5[2], line5[2])
        w, wn, wt = reconstruct_gauss_points(line5, dline, (1, 1, 1), ref,
                                             CFG, "weno_ao", GM, "x", 0.1)
        assert np.allclose(w, np.tile(line5[2], (2, 1)), atol=1e-13)
        assert np.allclose(wn, np.tile(dline, (2, 1)), atol=0)
        assert np.allclose(wt, 0.0, atol=1e-12)

    def test_two_point_average_reproduces_line_mean_smooth(self):
        # Gauss weights 1/2 each: for tangential variation up to cubic the
        # quadrature of reconstructed values equals the line average exactly
        rng = np.random.default_rng(61)
        dy = 0.1
        coeffs = self._coeffs(rng)
        line5 = np.empty((5, 4))
        for c in range(4):
            for row, k in enumerate(range(-2, 3)):
                line5[row, c] = sum(
                    co * ((k * dy) ** (n + 1) - ((k - 1) * dy) ** (n + 1)) / (n + 1)
                    for n, co in enumerate(coeffs[c])) / dy
        dline = np.zeros(4)
        ref = (line5[2], line5[2])
        w, _, wt = reconstruct_gauss_points(line5, dline, (1, 1, 1), ref,
                                            CFG, "weno_ao", GM, "x", dy)
        for c in range(4):
            assert 0.5 * (w[0, c] + w[1, c]) == pytest.approx(
                line5[2, c], rel=1e-9, abs=1e-9)
            # tangential derivative at each Gauss point matches the polynomial
            for k, u in enumerate(GAUSS_OFFSETS):
                assert wt[k, c] == pytest.approx(
                    poly_deriv_eval(coeffs[c], u * dy), rel=1e-6, abs=1e-6)

    def _coeffs(self, rng):
        rho = [2.0] + list(rng.uniform(-0.3, 0.3, 3))
        u0, p0 = 0.4, 1.1
        gm = GM.gamma
        return [rho, [u0 * c for c in rho], [0.0],
                [p0 / (gm - 1) + 0.5 * u0 * u0 * rho[0]]
                + [0.5 * u0 * u0 * c for c in rho[1:]]]

    def test_hybrid_branch_uses_same_side_alpha(self):
        line5 = np.tile(np.array([1.0, 0.0, 0.0, 2.5]), (5, 1))
        line5[:, 0] = [1.0, 1.2, 1.5, 1.9, 2.4]
        dline = np.array([0.7, 0.0, 0.0, 0.0])
        ref = (line5[2], line5[2])
        tri = (0.3, 0.25, 0.2)
        w, wn, wt = reconstruct_gauss_points(line5, dline, tri, ref,
                                             CFG, "hybrid", GM, "x", 0.2)
        for k, u in enumerate(GAUSS_OFFSETS):
            v, d = df_cubic_point(1.2, 1.5, 1.9, 0.25, u)
            assert w[k, 0] == pytest.approx(v, rel=1e-14)
            assert wt[k, 0] == pytest.approx(d / 0.2, rel=1e-14)
        assert np.all(wn == np.tile(dline, (2, 1)))
