import math

import numpy as np
import pytest
from scipy.integrate import quad

from haarcode import CodeParams, encode, rng_stream
from haarcode import ansatz as az
from haarcode.channels import depolarize, gamma_from_p
from haarcode.pauli import omega, pauli_spectrum

P_HASH = 0.1893
P2 = (3 - math.sqrt(3)) / 4


class TestShannonEntropy:
    def test_zero_rate(self):
        for q in (2, 3):
            for a in (1.0, 2.0, math.inf):
                assert az.shannon_entropy(0.0, q, a) == 0.0

    def test_hashing_root(self):
        p = az.threshold_solve("renyi", 0.0, 2, alpha=1)
        assert abs(p - P_HASH) < 2e-4
        assert abs(az.shannon_entropy(p, 2) - 1.0) < 1e-9

    def test_min_entropy_form(self):
        # H_inf = -log2(1-p) below p_max, root at 1/2
        assert az.shannon_entropy(0.3, 2, math.inf) == pytest.approx(-math.log2(0.7))
        p = az.threshold_solve("renyi", 0.0, 2, alpha=math.inf)
        assert abs(p - 0.5) < 1e-9

    def test_monotone_below_pmax(self):
        grid = np.linspace(0.0, 0.75, 40)
        for a in (1.0, 2.0, 8.0):
            vals = [az.shannon_entropy(p, 2, a) for p in grid]
            assert all(vals[i] <= vals[i + 1] + 1e-12 for i in range(len(vals) - 1))

    def test_renyi_ordering(self):
        for p in (0.1, 0.3):
            hs = [az.shannon_entropy(p, 2, a) for a in (1.0, 1.5, 2.0, 4.0, math.inf)]
            assert all(hs[i] >= hs[i + 1] - 1e-12 for i in range(len(hs) - 1))

    def test_domain(self):
        with pytest.raises(ValueError):
            az.shannon_entropy(-0.1, 2)
        with pytest.raises(ValueError):
            az.shannon_entropy(0.1, 2, alpha=0.5)


class TestMarchenkoPastur:
    def test_edges_c1(self):
        assert az.mp_edges(1.0) == (0.0, 4.0)

    @pytest.mark.parametrize("c", [31.0, 2.07, 1.0, 0.4])
    def test_rescaled_normalization(self, c):
        # quadrature oracle: the rescaled density integrates to one
        lo, hi = az.mp_edges(c)
        val, err = quad(lambda x: float(az.mp_rescaled_density(c, x)), lo, hi, limit=200)
        assert abs(val - 1) < 1e-6

    def test_concentration_large_c(self):
        lo, hi = az.mp_edges(1e6)
        assert hi - lo < 5e-3
        assert abs(0.5 * (lo + hi) - 1) < 1e-5

    def test_zero_outside_support(self):
        assert az.mp_density(2.0, -1.0) == 0.0
        assert az.mp_density(2.0, 100.0) == 0.0

    def test_cdf_monotone(self):
        xs = np.linspace(0, 4, 50)
        cdf = az.mp_rescaled_cdf(2.0, xs)
        assert np.all(np.diff(cdf) >= -1e-12)
        assert cdf[0] == 0.0 and abs(cdf[-1] - 1) < 1e-9

    def test_invalid_c(self):
        with pytest.raises(ValueError):
            az.mp_edges(0.0)


class TestCriticalWeight:
    def test_paper_examples(self):
        assert az.critical_weight(13, 1, 2, "RQ") == 4
        assert az.critical_weight(13, 1, 2, "Q") == 3
        assert az.critical_weight(1, 1, 2, "RQ") == 1

    def test_cumulative_oracle(self):
        # independent recomputation by direct summation
        for n, k, sub in [(9, 1, "RQ"), (9, 1, "Q"), (11, 2, "RQ"), (7, 1, "Q")]:
            thr = 2 ** (n + k) if sub == "RQ" else 2 ** (n - k)
            total, expect = 0, None
            for w in range(n + 1):
                total += omega(n, w, 2)
                if total >= thr:
                    expect = w
                    break
            assert az.critical_weight(n, k, 2, sub) == expect


class TestBandModels:
    def test_zeroth_order_mass(self):
        for p in (0.0, 0.1, 0.45):
            model = az.zeroth_order_bands(p, 9, 1, 2, "Q")
            assert abs(model.total_mass() - 1) < 1e-10

    def test_zeroth_order_ratio_is_u(self):
        p = 0.1
        model = az.zeroth_order_bands(p, 5, 1, 2, "Q")
        lam0 = model.records[0].mean
        lam1 = model.records[1].mean
        u = p / (3 * (1 - p))
        assert lam1 / lam0 == pytest.approx(u, rel=1e-12)

    @pytest.mark.parametrize("sub", ["RQ", "Q"])
    @pytest.mark.parametrize("p", [0.0, 0.05, 0.12, 0.3, 0.7])
    def test_mean_shift_trace(self, sub, p):
        for (n, k, q) in [(13, 1, 2), (9, 2, 2), (7, 1, 3)]:
            model = az.mean_shift_bands(p, n, k, q, sub)
            assert abs(model.total_mass() - 1) < 1e-10

    def test_mean_shift_p0(self):
        model = az.mean_shift_bands(0.0, 9, 1, 2, "Q")
        assert model.records[0].mean == pytest.approx(0.5, abs=1e-12)
        assert all(abs(r.mean) < 1e-15 for r in model.records[1:])

    def test_zeroth_vs_mean_shift_at_low_p(self):
        # shift corrections are subleading well below threshold; the uniform
        # tail lift scales as q^-(N+k) on the joint system, where the 1%
        # statement holds (on Q alone the lift is q^k larger)
        n, k = 11, 1
        p = 0.5 * P_HASH
        wc = az.critical_weight(n, k, 2, "RQ")
        zro = az.zeroth_order_bands(p, n, k, 2, "RQ")
        msa = az.mean_shift_bands(p, n, k, 2, "RQ")
        for w in range(max(wc - 1, 1)):
            z = zro.records[w].mean
            m = msa.mean_of(w)
            assert abs(m - z) / z < 0.01

    def test_reservoir_multiplicity(self):
        model = az.mean_shift_bands(0.1, 9, 1, 2, "Q")
        used = sum(r.multiplicity for r in model.records)
        assert used + model.reservoir.multiplicity == 2**9

    def test_band_density_normalization(self):
        # quadrature oracle: multiplicity-weighted density integrates to mult
        model = az.mean_shift_bands(0.08, 9, 1, 2, "Q")
        rec = model.records[1]
        scale = rec.multiplicity / rec.weight_prob
        lo = rec.shift + az.mp_edges(rec.mp_c)[0] / scale
        hi = rec.shift + az.mp_edges(rec.mp_c)[1] / scale
        val, _ = quad(lambda x: float(az.band_model_density(rec, x)), lo, hi, limit=200)
        assert abs(rec.multiplicity * val - rec.multiplicity) < 1e-5 * rec.multiplicity

    def test_plain_mp_when_unshifted(self):
        rec = az.zeroth_order_bands(0.1, 7, 1, 2, "Q").records[1]
        xs = np.linspace(0.5, 1.5, 7)
        scale = rec.multiplicity / rec.weight_prob
        direct = scale * az.mp_rescaled_density(rec.mp_c, xs * scale)
        assert np.allclose(az.band_model_density(rec, xs), direct)


class TestLeadingOrder:
    def test_coherent_info_cases(self):
        assert az.coherent_info_leading(0.0, 9, 1, 2) == 1.0
        assert az.coherent_info_leading(0.02, 20, 1, 2) == 1.0
        assert az.coherent_info_leading(0.7, 20, 1, 2) == -1.0
        # middle branch: N(1 - H(p))
        p = 0.21
        n, k = 50, 5
        h = az.shannon_entropy(p, 2)
        assert 1 - k / n < h < 1 + k / n
        assert az.coherent_info_leading(p, n, k, 2) == pytest.approx(n * (1 - h))

    def test_renyi_leading(self):
        assert az.renyi_entropy_leading(0.0, 1.0, 13, 1, 2, "Q") == 1.0
        assert az.renyi_entropy_leading(0.0, 2.0, 13, 1, 2, "RQ") == 0.0
        # saturation branch
        assert az.renyi_entropy_leading(0.4, 1.0, 13, 1, 2, "Q") == 13.0
        assert az.renyi_entropy_leading(0.6, 1.0, 13, 1, 2, "RQ") == 14.0
        # substitution example
        val = az.renyi_entropy_leading(0.1, 1.0, 13, 1, 2, "Q")
        assert val == pytest.approx(1 + 13 * az.shannon_entropy(0.1, 2), abs=1e-12)

    def test_w_star(self):
        assert az.w_star(0.3, 1.0, 10, 2) == pytest.approx(3.0, abs=1e-12)
        assert az.p_alpha(0.05, math.inf, 2) == 0.0
        # frozen from direct evaluation of the reweighting formula
        assert az.p_alpha(0.3, 2.0, 2) == pytest.approx(0.057692307692307696, abs=1e-12)

    def test_reweighted_vn(self):
        assert az.reweighted_vn_leading(0.0, 2.0, 9, 1, 2) == 1.0
        # alpha=1 joins the branches continuously at threshold
        pc = az.threshold_solve("renyi", 1 / 9, 2, alpha=1)
        below = az.reweighted_vn_leading(pc - 1e-6, 1.0, 9, 1, 2)
        assert abs(below - 9.0) < 1e-4
        # alpha=2 jumps at its own threshold
        pc2 = az.threshold_solve("renyi", 1 / 9, 2, alpha=2)
        below2 = az.reweighted_vn_leading(pc2 - 1e-9, 2.0, 9, 1, 2)
        assert below2 < 9.0 - 0.5
        assert az.reweighted_vn_leading(pc2 + 1e-9, 2.0, 9, 1, 2) == 9.0


class TestThresholds:
    def test_renyi2_zero_rate(self):
        assert abs(az.threshold_solve("renyi", 0.0, 2, alpha=2) - P2) < 1e-9

    def test_postselected_w0(self):
        assert abs(az.threshold_solve("postselected", 0.0, 2, w_over_N=0.0) - 0.5) < 1e-9

    def test_detection_closed_form(self):
        assert az.threshold_solve("detection", rate=0.0, q=2) == 0.5
        assert az.threshold_solve("detection", rate=0.5, q=4) == pytest.approx(0.5)

    def test_consistency_renyi1_vs_shannon(self):
        for kn in (0.0, 0.1, 0.2):
            p = az.threshold_solve("renyi", kn, 2, alpha=1)
            assert abs(az.shannon_entropy(p, 2) - (1 - kn)) < 1e-9

    def test_consistency_inf_vs_detection(self):
        for kn in (0.0, 0.1, 0.25):
            a = az.threshold_solve("renyi", kn, 2, alpha=math.inf)
            b = az.threshold_solve("detection", rate=kn, q=2)
            assert abs(a - b) < 1e-9

    def test_monotone_in_alpha(self):
        alphas = [1, 1.5, 2, 3, 4, 8, 16, 32, 64]
        pcs = [az.threshold_solve("renyi", 0.0, 2, alpha=a) for a in alphas]
        assert all(pcs[i] <= pcs[i + 1] + 1e-12 for i in range(len(pcs) - 1))

    def test_postselected_boundary_endpoints(self):
        # passes through the hashing point and the detection point
        pc = az.threshold_solve("renyi", 0.0, 2, alpha=1)
        assert abs(az.threshold_solve("postselected", 0.0, 2, w_over_N=pc) - pc) < 1e-4
        assert abs(az.threshold_solve("postselected", 0.0, 2, w_over_N=0.0) - 0.5) < 1e-9

    def test_solver_error_without_bracket(self):
        # postselecting above the hashing weight has no threshold
        with pytest.raises(ValueError):
            az.threshold_solve("postselected", 0.0, 2, w_over_N=0.35)


class TestEnumerators:
    def test_haar_endpoints(self):
        pair = az.enumerator_haar(9, 1, 2)
        assert float(pair.A(0)) == pytest.approx(1.0, abs=1e-12)
        assert float(pair.B(0)) == pytest.approx(1.0, abs=1e-12)
        assert float(pair.A(1)) == pytest.approx(2**8, rel=1e-12)
        assert float(pair.B(1)) == pytest.approx(2**10, rel=1e-12)

    def test_k_equals_n(self):
        pair = az.enumerator_haar(5, 5, 2)
        assert pair.haar_constant == 0.0
        for u in (0.0, 0.3, 1.0):
            assert float(pair.A(u)) == pytest.approx(1.0, abs=1e-12)

    def test_macwilliams_analytic(self):
        pair = az.enumerator_haar(11, 1, 2)
        res1, res2 = az.macwilliams_check(pair, np.linspace(0, 1, 21))
        assert np.abs(res1).max() < 1e-9
        assert abs(res2) < 1e-9

    def test_macwilliams_u1_endpoint(self):
        pair = az.enumerator_haar(7, 1, 2)
        res1, _ = az.macwilliams_check(pair, np.array([1.0]))
        assert abs(res1[0]) < 1e-12

    def test_macwilliams_numeric_per_sample(self):
        psi = encode(CodeParams(N=5, k=1), rng_stream(42, 0))
        spec = pauli_spectrum(psi.rho_rq(), q=2, logical_split=1)
        pair = az.enumerator_from_phi(spec.phi_identity, spec.phi_total, 5, 1, 2)
        res1, res2 = az.macwilliams_check(pair, np.array([0.0, 0.2, 1 / 3, 0.7, 1.0]))
        assert np.abs(res1).max() < 1e-9
        assert abs(res2) < 1e-9

    def test_postselect_failure(self):
        pair = az.enumerator_haar(11, 1, 2)
        assert az.postselect_failure(pair, 0.0) == 0.0
        assert az.postselect_failure(pair, 1 / 3) == pytest.approx(1 / 3, abs=1e-12)
        # monotone sweep on the analytic pair
        us = np.linspace(0.0, 1 / 3, 15)
        vals = [az.postselect_failure(pair, u) for u in us]
        assert all(vals[i] <= vals[i + 1] + 1e-12 for i in range(len(vals) - 1))
        assert all(0 <= v <= 1 / 3 + 1e-12 for v in vals)

    def test_renyi2_dense_purity_oracle(self):
        psi = encode(CodeParams(N=4, k=1), rng_stream(43, 0))
        spec = pauli_spectrum(psi.rho_rq(), q=2, logical_split=1)
        pair = az.enumerator_from_phi(spec.phi_identity, spec.phi_total, 4, 1, 2)
        gamma = 0.3
        p = (1 - 1 / 4) * gamma
        noisy_q = depolarize(psi.rho_q(), p)
        noisy_rq = depolarize(psi.rho_rq(), p, sites=range(1, 5), dims=(2,) * 5)
        s2q, s2rq, ic2 = az.renyi2_from_enumerators(pair, gamma)
        assert s2q == pytest.approx(-np.log2(np.real(np.vdot(noisy_q, noisy_q))), abs=1e-9)
        assert s2rq == pytest.approx(-np.log2(np.real(np.vdot(noisy_rq, noisy_rq))), abs=1e-9)
        assert ic2 == pytest.approx(s2q - s2rq, abs=1e-12)

    def test_renyi2_limits(self):
        pair = az.enumerator_haar(9, 1, 2)
        s2q, s2rq, _ = az.renyi2_from_enumerators(pair, 0.0)
        assert s2q == pytest.approx(1.0, abs=1e-9)
        assert s2rq == pytest.approx(0.0, abs=1e-9)

    def test_renyi2_crossing_location(self):
        gamma2 = 1 - 1 / math.sqrt(3)
        assert gamma_from_p(P2) == pytest.approx(gamma2, abs=1e-12)
        pair = az.enumerator_haar(61, 1, 2)
        _, _, ic2 = az.renyi2_from_enumerators(pair, gamma2)
        assert abs(ic2) < 1e-6

    def test_leading_eigenvalue_bridge(self):
        # mean-shift band-0 eigenvalue vs enumerator expressions
        for (n, k, p) in [(9, 1, 0.1), (11, 1, 0.15), (13, 1, 0.1)]:
            pair = az.enumerator_haar(n, k, 2)
            u = az.u_of_p(p, 2)
            lam_rq = az.mean_shift_bands(p, n, k, 2, "RQ").records[0].mean
            lam_q = az.mean_shift_bands(p, n, k, 2, "Q").records[0].mean
            tol = 10 * 2.0 ** -(n - k)
            assert abs(lam_rq - (1 - p) ** n * float(pair.A(u))) / lam_rq <= tol
            assert abs(lam_q - (1 - p) ** n * float(pair.B(u)) / 2**k) / lam_q <= tol
