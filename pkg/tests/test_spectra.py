import math

import numpy as np
import pytest

from haarcode import CodeParams, coherent_information, encode, entropy, rng_stream, spectrum
from haarcode.pauli import omega
from haarcode.spectra import Spectrum, band_projectors, spectrum_from_values


class TestSpectrum:
    def test_diagonal(self):
        spec = spectrum(np.diag([0.7, 0.3]).astype(complex))
        assert np.allclose(spec.values, [0.7, 0.3])
        assert abs(spec.trace - 1) < 1e-12

    def test_maximally_mixed(self):
        spec = spectrum(np.eye(8) / 8)
        assert np.allclose(spec.values, 1 / 8)

    def test_dyad(self):
        v = np.array([0.6, 0.8j])
        spec = spectrum(np.outer(v, v.conj()))
        assert abs(spec.values[0] - 1) < 1e-12
        assert abs(spec.values[1]) < 1e-12

    def test_non_hermitian_rejected(self):
        m = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(ValueError):
            spectrum(m)

    def test_clamping_and_padding(self):
        spec = spectrum_from_values(np.array([1.0, -1e-12, 1e-16]), dim=5)
        assert spec.values.size == 5
        assert np.all(spec.values >= 0)
        assert spec.values[1] == 0.0


class TestEntropy:
    def test_uniform_any_alpha(self):
        spec = Spectrum(np.ones(16) / 16, dim=16, trace=1.0)
        for a in (1.0, 1.5, 2.0, 4.0, math.inf):
            assert entropy(spec, alpha=a) == pytest.approx(4.0, abs=1e-12)

    def test_pure_state(self):
        spec = spectrum_from_values(np.array([1.0, 0.0, 0.0]))
        for a in (1.0, 2.0, math.inf):
            assert entropy(spec, alpha=a) == pytest.approx(0.0, abs=1e-12)

    def test_min_entropy(self):
        spec = Spectrum(np.array([0.5, 0.3, 0.2]), dim=3, trace=1.0)
        assert entropy(spec, alpha=math.inf) == pytest.approx(1.0, abs=1e-12)

    def test_alpha_limit_continuity(self):
        # alpha < 1 is outside the domain, so the limit check is one-sided
        rng = np.random.default_rng(0)
        vals = rng.random(32)
        vals /= vals.sum()
        spec = Spectrum(np.sort(vals)[::-1], dim=32, trace=1.0)
        s1 = entropy(spec, alpha=1.0)
        assert abs(entropy(spec, alpha=1 + 1e-6) - s1) < 1e-4

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(1)
        for trial in range(5):
            vals = rng.random(20)
            vals /= vals.sum()
            spec = Spectrum(np.sort(vals)[::-1], dim=20, trace=1.0)
            ents = [entropy(spec, alpha=a) for a in (1.0, 1.5, 2.0, 4.0, math.inf)]
            assert all(ents[i] >= ents[i + 1] - 1e-12 for i in range(len(ents) - 1))

    def test_base_q(self):
        spec = Spectrum(np.ones(9) / 9, dim=9, trace=1.0)
        assert entropy(spec, base=3) == pytest.approx(2.0, abs=1e-12)

    def test_alpha_below_one_rejected(self):
        spec = Spectrum(np.ones(2) / 2, dim=2, trace=1.0)
        with pytest.raises(ValueError):
            entropy(spec, alpha=0.5)


class TestCoherentInformation:
    def test_both_maximally_mixed(self):
        n, k = 4, 1
        sq = Spectrum(np.ones(2**n) / 2**n, dim=2**n, trace=1.0)
        srq = Spectrum(np.ones(2 ** (n + k)) / 2 ** (n + k), dim=2 ** (n + k), trace=1.0)
        assert coherent_information(sq, srq, k=k) == pytest.approx(-k, abs=1e-12)

    def test_clean_code(self):
        psi = encode(CodeParams(N=4, k=1), rng_stream(31, 0))
        sq = spectrum(psi.rho_q())
        srq = spectrum(psi.rho_rq())
        assert coherent_information(sq, srq, k=1) == pytest.approx(1.0, abs=1e-9)
        assert coherent_information(sq, srq, k=1, alpha=math.inf) == pytest.approx(1.0, abs=1e-9)

    def test_bounds_enforced(self):
        sq = Spectrum(np.ones(4) / 4, dim=4, trace=1.0)
        srq = Spectrum(np.array([1.0, 0, 0, 0, 0, 0, 0, 0]), dim=8, trace=1.0)
        with pytest.raises(ValueError):
            coherent_information(sq, srq, k=1)


class TestBandProjectors:
    def test_band0_rank(self):
        psi = encode(CodeParams(N=4, k=1), rng_stream(32, 0))
        bd_rq = band_projectors(psi, 1, "RQ")
        assert bd_rq.ranks[0] == 1
        bd_q = band_projectors(psi, 1, "Q")
        assert bd_q.ranks[0] == 2

    def test_full_rank_bands_below_critical(self):
        # N=7, k=1: cumulative count 1 + 21 + 189 = 211 < 256, so both
        # nontrivial bands sit below the critical weight and carry full rank
        psi = encode(CodeParams(N=7, k=1), rng_stream(32, 1))
        bd = band_projectors(psi, 2, "RQ")
        assert bd.ranks[1] == omega(7, 1, 2)
        assert bd.ranks[2] == omega(7, 2, 2)

    def test_resolution_of_identity(self):
        # hierarchy exhausts the space at the critical weight
        psi = encode(CodeParams(N=6, k=1), rng_stream(32, 2))
        bd = band_projectors(psi, 6, "RQ")
        assert bd.total_rank == 2**7
        assert bd.residual_rank == 0
        # reservoir band is rank-truncated
        full = [omega(6, w, 2) for w in bd.weights]
        assert bd.ranks[bd.weights[-1]] < full[-1]

    def test_mutual_orthogonality(self):
        psi = encode(CodeParams(N=5, k=1), rng_stream(32, 3))
        bd = band_projectors(psi, 2, "RQ")
        for w1 in bd.weights:
            for w2 in bd.weights:
                if w1 < w2:
                    cross = np.abs(bd.blocks[w1].conj().T @ bd.blocks[w2]).max()
                    assert cross < 1e-8

    def test_blocks_orthonormal(self):
        psi = encode(CodeParams(N=5, k=1), rng_stream(32, 4))
        bd = band_projectors(psi, 2, "Q")
        for w in bd.weights:
            b = bd.blocks[w]
            assert np.abs(b.conj().T @ b - np.eye(b.shape[1])).max() < 1e-10

    def test_projector_matrix(self):
        psi = encode(CodeParams(N=3, k=1), rng_stream(32, 5))
        bd = band_projectors(psi, 1, "RQ")
        pi1 = bd.projector(1)
        assert np.abs(pi1 @ pi1 - pi1).max() < 1e-10
        assert abs(np.trace(pi1).real - bd.ranks[1]) < 1e-10


class TestBandHierarchyN9:
    def test_rank_and_identity_resolution(self):
        # N=9, k=1 joint space: band 1 rank 27; full hierarchy spans 2^10
        from haarcode import CodeParams, encode, rng_stream

        psi = encode(CodeParams(N=9, k=1), rng_stream(33, 0))
        bd = band_projectors(psi, 9, "RQ")
        assert bd.ranks[1] == omega(9, 1, 2)
        assert bd.total_rank == 2**10
        assert bd.residual_rank == 0

    def test_rank_stability_across_samples(self):
        # below the critical weight the numerical rank equals the error count
        from haarcode import CodeParams, encode, rng_stream

        hits = 0
        for s in range(4):
            psi = encode(CodeParams(N=7, k=1), rng_stream(34, s))
            bd = band_projectors(psi, 2, "RQ")
            hits += bd.ranks[1] == omega(7, 1, 2) and bd.ranks[2] == omega(7, 2, 2)
        assert hits == 4


class TestReconstructionResidual:
    def test_small_residual(self):
        from haarcode.spectra import reconstruction_residual

        rng = np.random.default_rng(3)
        m = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        assert reconstruction_residual(rho) < 1e-9
