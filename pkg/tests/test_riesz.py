import math

import numpy as np
import pytest

from prolatesum.prolate import Family, ProlateSpec, solve
from prolatesum.riesz import (
    DeltaThreshold,
    ExponentTable,
    RieszConfig,
    bump,
    bump_zero,
    bump_zero_piece,
    delta_threshold,
    dual_exponent,
    dyadic_cutoff,
    dyadic_piece,
    dyadic_tail,
    expansion_coeffs,
    gamma_cpswf,
    gamma_gpswf,
    riesz_kernel,
    riesz_mean,
    riesz_weight,
)
from prolatesum.transforms import SampledFunction, sample_mode


@pytest.fixture(scope="module")
def es():
    return solve(ProlateSpec(family=Family.GPSWF, alpha=0.0, c=1.0, N=128))


@pytest.fixture(scope="module")
def rule(es):
    return es.default_rule(512)


def ulps(x, n=4):
    return n * math.ulp(max(abs(x), 1.0))


class TestRieszWeight:
    def test_midpoint(self):
        assert riesz_weight(5.0, RieszConfig(R=10.0, delta=1.0)) == pytest.approx(0.5)

    def test_truncation(self):
        cfg = RieszConfig(R=7.0, delta=2.3)
        assert riesz_weight(7.0, cfg) == 0.0
        assert riesz_weight(11.0, cfg) == 0.0

    def test_at_zero(self):
        assert riesz_weight(0.0, RieszConfig(R=3.0, delta=0.7)) == 1.0

    def test_monotonicity(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            R = float(rng.uniform(0.5, 100))
            d = float(rng.uniform(0.05, 4))
            chi = np.sort(rng.uniform(0, 1.5 * R, size=20))
            w = riesz_weight(chi, RieszConfig(R=R, delta=d))
            assert np.all(np.diff(w) <= 1e-15)
            assert np.all((0 <= w) & (w <= 1))
            w2 = riesz_weight(chi, RieszConfig(R=R * 1.5, delta=d))
            assert np.all(w2 >= w - 1e-15)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RieszConfig(R=0.0, delta=1.0)
        with pytest.raises(ValueError):
            RieszConfig(R=1.0, delta=-0.5)
        with pytest.raises(ValueError):
            RieszConfig(R=np.inf, delta=1.0)


class TestBump:
    def test_peak(self):
        assert bump(1.0) == 1.0

    def test_support_endpoints(self):
        assert bump(0.5) == 0.0
        assert bump(2.0) == 0.0
        assert bump(0.49) == 0.0
        assert bump(2.01) == 0.0
        assert bump(-3.0) == 0.0

    def test_range(self):
        t = np.linspace(0.4, 2.2, 2001)
        v = bump(t)
        assert np.all((v >= 0) & (v <= 1))

    def test_telescoping_at_07(self):
        total = sum(bump(2.0**k * 0.7) for k in range(-30, 31))
        assert abs(total - 1.0) <= 1e-14

    def test_partition_of_unity_random(self):
        rng = np.random.default_rng(11)
        t = rng.uniform(1e-6, 1.0, size=10_000)
        total = np.zeros_like(t)
        for k in range(-40, 41):
            total += bump(np.ldexp(t, k))
        assert np.max(np.abs(total - 1.0)) <= 1e-13

    def test_smooth_across_junctions(self):
        # C^inf construction: values agree closely around t = 1
        eps = 1e-8
        assert abs(bump(1.0 - eps) - bump(1.0 + eps)) <= 1e-7


class TestBumpZero:
    def test_one_for_t_ge_1(self):
        assert bump_zero(1.0) == 1.0
        assert bump_zero(5.7) == 1.0

    def test_zero_for_small_t(self):
        assert bump_zero(0.25) == 0.0
        assert bump_zero(0.1) == 0.0
        assert bump_zero(-1.0) == 0.0

    def test_complement_identity(self):
        t = np.geomspace(1e-5, 0.999, 400)
        tail = np.zeros_like(t)
        for k in range(1, 60):
            tail += bump(np.ldexp(t, k))
        assert np.max(np.abs(bump_zero(t) + tail - 1.0)) <= 1e-13


class TestDyadicPiece:
    def test_support_window(self):
        cfg = RieszConfig(R=100.0, delta=1.5)
        for k in (1, 2, 5):
            lo = 100.0 * (1 - 2.0 ** (-k + 1))
            hi = 100.0 * (1 - 2.0 ** (-k - 1))
            chi = np.linspace(0, 130, 4001)
            vals = dyadic_piece(chi, cfg, k)
            outside = (chi <= lo) | (chi >= hi)
            assert np.max(np.abs(vals[outside])) == 0.0
            inside = (chi > lo + 1) & (chi < hi - 1)
            assert np.max(vals[inside]) > 0

    def test_sup_bound(self):
        cfg = RieszConfig(R=50.0, delta=0.8)
        grid = np.linspace(0.0, 55.0, 100_001)
        for k in range(1, dyadic_cutoff(cfg) + 1):
            sup = np.max(np.abs(dyadic_piece(grid, cfg, k)))
            assert sup <= 2.0**cfg.delta * 2.0 ** (-k * cfg.delta)

    def test_rejects_k0(self):
        with pytest.raises(ValueError):
            dyadic_piece(1.0, RieszConfig(R=10, delta=1), 0)

    def test_decomposition_identity(self, es):
        rng = np.random.default_rng(17)
        for _ in range(10):
            R = float(rng.uniform(es.chi[2], es.certified_max))
            d = float(rng.uniform(0.1, 3.0))
            cfg = RieszConfig(R=R, delta=d)
            total = bump_zero_piece(es.chi, cfg)
            for k in range(1, dyadic_cutoff(cfg) + 1):
                total = total + dyadic_piece(es.chi, cfg, k)
            total = total + dyadic_tail(es.chi, cfg)
            gap = np.max(np.abs(total - riesz_weight(es.chi, cfg)))
            assert gap <= 1e-12, (R, d)

    def test_head_is_weight_for_chi_well_inside(self):
        # for chi <= 0 distance: t >= 1 means only the head survives
        cfg = RieszConfig(R=10.0, delta=1.3)
        assert bump_zero_piece(0.0, cfg) == pytest.approx(1.0)
        assert dyadic_tail(0.0, cfg) == 0.0


class TestExpansionAndMean:
    def test_single_mode_coefficients(self, es, rule):
        f = sample_mode(es, 0, rule=rule)
        a = expansion_coeffs(f, es)
        expected = np.zeros(es.n_retained)
        expected[0] = 1.0
        assert np.max(np.abs(a - expected)) <= 1e-10

    def test_constant_at_c0(self):
        es0 = solve(ProlateSpec(family=Family.GPSWF, alpha=0.0, c=0.0, N=64))
        rule = es0.default_rule(256)
        f = SampledFunction(rule=rule, values=np.ones(256))
        a = expansion_coeffs(f, es0)
        assert a[0] == pytest.approx(np.sqrt(2.0), abs=1e-13)
        assert np.max(np.abs(a[1:])) <= 1e-13

    def test_exp_coefficient_decay(self, es, rule):
        f = SampledFunction(rule=rule, values=np.exp(rule.nodes))
        a = expansion_coeffs(f, es)
        assert np.max(np.abs(a[30:])) <= 1e-12

    def test_grid_mismatch(self, es):
        from prolatesum.specfun import gauss_jacobi

        bad = gauss_jacobi(64, 0.5, 0.5)
        with pytest.raises(ValueError, match="family quadrature"):
            expansion_coeffs(SampledFunction(rule=bad, values=np.ones(64)), es)

    def test_riesz_mean_single_mode(self, es, rule):
        f = sample_mode(es, 0, rule=rule)
        cfg = RieszConfig(R=float(es.chi[10]), delta=1.5)
        g = riesz_mean(f, es, cfg)
        w0 = (1 - es.chi[0] / cfg.R) ** 1.5
        assert np.max(np.abs(g.values - w0 * f.values)) <= 1e-10

    def test_riesz_mean_zero_below_first_eigenvalue(self, es, rule):
        f = sample_mode(es, 0, rule=rule)
        cfg = RieszConfig(R=float(es.chi[0]) * 0.5, delta=1.0)
        g = riesz_mean(f, es, cfg)
        assert np.max(np.abs(g.values)) == 0.0

    def test_riesz_mean_exp_error_slope(self, es, rule):
        # smooth f: low-mode weight deficit dominates, error ~ 1/R
        f = SampledFunction(rule=rule, values=np.exp(rule.nodes))
        errs = []
        for idx in (20, 40):
            cfg = RieszConfig(R=float(es.chi[idx]), delta=1.0)
            g = riesz_mean(f, es, cfg)
            errs.append(np.sqrt(np.sum(rule.weights * (f.values - g.values) ** 2)))
        assert errs[1] < errs[0]
        slope = (np.log(errs[1]) - np.log(errs[0])) / (np.log(es.chi[40]) - np.log(es.chi[20]))
        assert slope == pytest.approx(-1.0, abs=0.3)

    def test_radius_beyond_certified_rejected(self, es, rule):
        f = sample_mode(es, 0, rule=rule)
        with pytest.raises(ValueError, match="exceeds certified spectrum"):
            riesz_mean(f, es, RieszConfig(R=es.certified_max * 1.01, delta=1.0))


class TestRieszKernel:
    def test_symmetry_exact(self, es):
        cfg = RieszConfig(R=float(es.chi[20]), delta=1.0)
        rng = np.random.default_rng(2)
        for _ in range(10):
            x, y = rng.uniform(-0.99, 0.99, size=2)
            assert riesz_kernel(es, cfg, x, y) == riesz_kernel(es, cfg, y, x)

    def test_rank_one_limit(self, es):
        # huge delta with R below chi_1: only mode 0 survives with weight w0
        cfg = RieszConfig(R=float(es.chi[1]) - 0.5, delta=40.0)
        w0 = riesz_weight(es.chi[0], cfg)
        x, y = 0.3, -0.45
        expected = w0 * es.eval(0, x) * es.eval(0, y)
        assert riesz_kernel(es, cfg, x, y) == pytest.approx(expected, rel=1e-10)

    def test_reproducing_identity(self, es, rule):
        # quadrature of K_R(x, .) f(.) w(.) equals the summed mean at x
        cfg = RieszConfig(R=float(es.chi[30]), delta=1.0)
        f = SampledFunction(rule=rule, values=rule.nodes**2)
        g = riesz_mean(f, es, cfg)
        for x in np.linspace(-0.9, 0.9, 8):
            krow = np.array([riesz_kernel(es, cfg, x, float(y)) for y in rule.nodes])
            via_kernel = np.sum(rule.weights * krow * f.values)
            ix = np.argmin(np.abs(rule.nodes - x))
            direct = float((riesz_weight(es.chi, cfg) * expansion_coeffs(f, es))
                           @ es.mode_matrix(np.array([x]))[:, 0])
            assert abs(via_kernel - direct) <= 1e-10
            assert abs(via_kernel - g.values[ix]) <= abs(direct - g.values[ix]) + 1e-10


class TestGammaTables:
    def test_gpswf_table_values_alpha0(self):
        assert abs(gamma_gpswf(0.0, 10.0) - 0.3) <= ulps(0.3)
        assert gamma_gpswf(0.0, 1.0) == 1.0
        assert gamma_gpswf(0.0, 2.0) == 0.0

    def test_gpswf_branches(self):
        # p'_0 = 4 at alpha = 0; epsilon branch exactly on the critical line
        assert gamma_gpswf(0.0, 4.0, eps_choice=0.02) == 0.02
        assert gamma_gpswf(0.0, 3.999) == 0.0
        assert gamma_gpswf(0.0, math.inf) == pytest.approx(0.5)

    def test_gpswf_third_branch_continuity_alpha0(self):
        # 2(alpha+1)(1/2 - 1/p'_0) - 1/2 vanishes at alpha = 0, p'_0 = 4
        val = 2 * 1.0 * (0.5 - 0.25) - 0.5
        assert val == 0.0

    def test_gpswf_range_guard(self):
        with pytest.raises(ValueError):
            gamma_gpswf(1.6, 2.0)
        with pytest.raises(ValueError):
            gamma_gpswf(-0.2, 2.0)
        assert gamma_gpswf(-0.2, 2.0, allow_extended_range=True) == 0.0
        with pytest.raises(ValueError):
            gamma_gpswf(-0.7, 2.0, allow_extended_range=True)

    def test_cpswf_table_values(self):
        assert gamma_cpswf(2.0) == 0.0
        assert gamma_cpswf(1.0) == 1.0
        assert abs(gamma_cpswf(8.0) - (-7.0 / 24.0)) <= ulps(7 / 24)

    def test_cpswf_branches(self):
        assert gamma_cpswf(4.0, eps_choice=0.05) == pytest.approx(0.05 - 0.25)
        assert gamma_cpswf(3.0) == pytest.approx(1 / 3 - 1 / 2)
        assert gamma_cpswf(math.inf) == pytest.approx(-1 / 3)

    def test_p_below_one_rejected(self):
        with pytest.raises(ValueError):
            gamma_gpswf(0.0, 0.9)
        with pytest.raises(ValueError):
            gamma_cpswf(0.5)


class TestDeltaThreshold:
    def test_p2_is_zero(self):
        table = ExponentTable(Family.GPSWF, 0.0)
        thr = delta_threshold(table, 2.0)
        assert thr == DeltaThreshold(0.0, False)

    def test_critical_line_flagged(self):
        table = ExponentTable(Family.GPSWF, 0.0, eps_choice=0.01)
        thr = delta_threshold(table, 4.0 / 3.0)
        assert thr.critical
        assert thr.value == pytest.approx(0.005)
        assert table.p0 == pytest.approx(4.0 / 3.0)
        assert table.p0_dual == pytest.approx(4.0)

    def test_p_to_one_limit(self):
        table = ExponentTable(Family.GPSWF, 0.0)
        assert delta_threshold(table, 1.0).value == pytest.approx(0.25)
        assert delta_threshold(table, 1.000001).value == pytest.approx(0.25, abs=1e-5)

    def test_cpswf_threshold(self):
        table = ExponentTable(Family.CPSWF, 1.0)
        assert delta_threshold(table, 2.0).value == 0.0
        # p' = inf -> gamma = -1/3 -> clipped at zero
        assert delta_threshold(table, 1.0).value == 0.0
        assert table.epsilon == 2.0
        # the circular theorem excludes no exponent
        assert not delta_threshold(table, 4.0 / 3.0).critical

    def test_negative_gamma_clipped_visible(self):
        # theorem 2's third branch is negative for p > 4: the raw gamma stays
        # visible while the threshold reports the max with zero
        table = ExponentTable(Family.CPSWF, 1.0)
        assert table.gamma(8.0) < 0
        assert delta_threshold(table, 8.0 / 7.0).value == 0.0


def test_dual_exponent():
    assert dual_exponent(1.0) == math.inf
    assert dual_exponent(math.inf) == 1.0
    assert dual_exponent(2.0) == 2.0
    assert dual_exponent(4.0) == pytest.approx(4.0 / 3.0)
