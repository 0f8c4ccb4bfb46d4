import math

import numpy as np
import pytest

from haarcode import CodeParams, encode, rng_stream
from haarcode.channels import depolarize
from haarcode.ensemble import reduce_state
from haarcode.postselect import (
    acceptance_probability,
    hard_band_postselect,
    postselected_coherent_info,
    soft_reweight,
    soft_reweight_spectra,
)
from haarcode.spectra import band_projectors, entropy, spectrum


def corrupted_pair(n=4, k=1, p=0.25, seed=51, sample=0):
    psi = encode(CodeParams(N=n, k=k), rng_stream(seed, sample))
    dims = (2,) * (n + k)
    rho_rq = depolarize(psi.rho_rq(), p, sites=range(k, n + k), dims=dims)
    rho_q = reduce_state(rho_rq, dims, keep=tuple(range(k, n + k)))
    return psi, rho_q, rho_rq


class TestSoftReweight:
    def test_alpha1_identity(self):
        _, rho_q, _ = corrupted_pair()
        state = soft_reweight(rho_q, alpha=1)
        assert np.abs(state.sigma - rho_q).max() < 1e-10
        assert state.acceptance == pytest.approx(1.0, abs=1e-10)

    def test_spectral_reweighting(self):
        _, rho_q, _ = corrupted_pair()
        lam = np.clip(np.linalg.eigvalsh(rho_q), 0, None)
        state = soft_reweight(rho_q, alpha=3)
        got = np.sort(np.linalg.eigvalsh(state.sigma))
        expect = np.sort(lam**3 / (lam**3).sum())
        assert np.abs(got - expect).max() < 1e-10

    def test_partial_trace_consistency(self):
        # Tr_R sigma_RQ = sigma_Q for the lifted POVM
        _, rho_q, rho_rq = corrupted_pair(n=7, k=1, p=0.25)
        sq, srq = soft_reweight(rho_q, rho_rq, alpha=2)
        tr = reduce_state(srq.sigma, (2,) * 8, keep=tuple(range(1, 8)))
        assert np.abs(tr - sq.sigma).max() < 1e-9

    def test_fast_path_matches_dense(self):
        _, rho_q, rho_rq = corrupted_pair(n=5, k=1)
        for alpha in (1.5, 2.0, 4.0):
            sq, srq = soft_reweight(rho_q, rho_rq, alpha=alpha)
            fq, frq, acc = soft_reweight_spectra(rho_q, rho_rq, alpha=alpha)
            assert np.abs(fq.values - spectrum(sq.sigma).values).max() < 1e-10
            assert np.abs(frq.values - spectrum(srq.sigma).values).max() < 1e-10
            assert acc == pytest.approx(sq.acceptance, abs=1e-12)

    def test_povm_validity(self):
        # eigenvalues of M^dag M lie in [0, 1] for alpha >= 1
        _, rho_q, _ = corrupted_pair()
        lam, vecs = np.linalg.eigh(rho_q)
        lam = np.clip(lam, 0, None)
        for alpha in (1.0, 2.0, 7.0):
            m = (vecs * lam ** ((alpha - 1) / 2)) @ vecs.conj().T
            evals = np.linalg.eigvalsh(m.conj().T @ m)
            assert evals.min() > -1e-10
            assert evals.max() < 1 + 1e-10

    def test_alpha_domain(self):
        _, rho_q, _ = corrupted_pair()
        with pytest.raises(ValueError):
            soft_reweight(rho_q, alpha=0.5)


class TestAcceptance:
    def test_alpha1(self):
        _, rho_q, _ = corrupted_pair()
        assert acceptance_probability(rho_q, 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_maximally_mixed(self):
        n = 4
        rho = np.eye(2**n) / 2**n
        for alpha in (2.0, 3.0):
            expect = 2.0 ** (n * (1 - alpha))
            assert acceptance_probability(rho, alpha) == pytest.approx(expect, rel=1e-10)

    def test_purity_oracle(self):
        _, rho_q, _ = corrupted_pair()
        direct = float(np.trace(rho_q @ rho_q).real)
        assert abs(acceptance_probability(rho_q, 2.0) - direct) < 1e-11

    def test_renyi_link(self):
        # -log_q acceptance = (alpha - 1) S_alpha
        _, rho_q, _ = corrupted_pair()
        spec = spectrum(rho_q)
        for alpha in (1.5, 2.0, 4.0):
            acc = acceptance_probability(rho_q, alpha)
            s_alpha = entropy(spec, alpha=alpha)
            assert abs(-math.log2(acc) - (alpha - 1) * s_alpha) < 1e-9


class TestHardBand:
    def test_p0_band0(self):
        psi, _, _ = corrupted_pair(p=0.0)
        bands = band_projectors(psi, 1, "RQ")
        rho = psi.rho_rq()
        state = hard_band_postselect(rho, bands, 0)
        assert state.acceptance == pytest.approx(1.0, abs=1e-10)
        assert np.abs(state.sigma - rho).max() < 1e-9

    def test_rank_bound(self):
        psi, rho_q, _ = corrupted_pair(n=5, p=0.2)
        bands = band_projectors(psi, 2, "Q")
        for w in bands.weights:
            state = hard_band_postselect(rho_q, bands, w)
            rank = (np.linalg.eigvalsh(state.sigma) > 1e-12).sum()
            assert rank <= bands.ranks[w]

    def test_trace_accounting(self):
        # acceptances over a full band hierarchy sum to one
        psi, rho_q, _ = corrupted_pair(n=5, p=0.3)
        bands = band_projectors(psi, 5, "Q")
        assert bands.total_rank == 2**5
        total = sum(hard_band_postselect(rho_q, bands, w).acceptance for w in bands.weights)
        assert abs(total - 1) < 1e-9

    def test_lifted_projector(self):
        psi, rho_q, rho_rq = corrupted_pair(n=4, p=0.2)
        bands = band_projectors(psi, 1, "Q")
        state = hard_band_postselect(rho_rq, bands, 1)  # lifts 1_R x Pi
        lifted = np.kron(np.eye(2), bands.projector(1))
        expect = lifted @ rho_rq @ lifted
        expect /= np.trace(expect).real
        assert np.abs(state.sigma - expect).max() < 1e-10

    def test_degenerate_rejected(self):
        psi, _, _ = corrupted_pair(p=0.0)
        bands = band_projectors(psi, 1, "RQ")
        with pytest.raises(ValueError):
            hard_band_postselect(psi.rho_rq(), bands, 1)

    def test_missing_band(self):
        psi, rho_q, _ = corrupted_pair()
        bands = band_projectors(psi, 1, "Q")
        with pytest.raises(ValueError):
            hard_band_postselect(rho_q, bands, 3)


class TestPostselectedCoherentInfo:
    def test_alpha1_equals_plain(self):
        _, rho_q, rho_rq = corrupted_pair(n=5)
        sq, srq = soft_reweight(rho_q, rho_rq, alpha=1)
        ic_post = postselected_coherent_info(sq, srq, k=1)
        ic_plain = entropy(spectrum(rho_q)) - entropy(spectrum(rho_rq))
        assert abs(ic_post - ic_plain) < 1e-9

    def test_p0_gives_k(self):
        _, rho_q, rho_rq = corrupted_pair(p=0.0)
        for alpha in (1.0, 2.0, 5.0):
            sq, srq = soft_reweight(rho_q, rho_rq, alpha=alpha)
            assert postselected_coherent_info(sq, srq, k=1) == pytest.approx(1.0, abs=1e-8)

    def test_protocol_mismatch(self):
        _, rho_q, rho_rq = corrupted_pair()
        sq, _ = soft_reweight(rho_q, rho_rq, alpha=2)
        _, srq = soft_reweight(rho_q, rho_rq, alpha=3)
        with pytest.raises(ValueError):
            postselected_coherent_info(sq, srq)


class TestInfiniteAlphaGuard:
    def test_soft_reweight_rejects_inf(self):
        _, rho_q, rho_rq = corrupted_pair()
        with pytest.raises(ValueError):
            soft_reweight(rho_q, alpha=math.inf)
        with pytest.raises(ValueError):
            soft_reweight_spectra(rho_q, rho_rq, alpha=math.inf)
