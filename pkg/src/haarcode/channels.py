"""Depolarizing and fixed-weight Pauli channels on dense density matrices.

The production depolarizing path applies the single-site channel site by
site in O(N d^2), using the operator identity
``sum_{v != 0} E_v X E_v^dag = q^2 Tr_i(X) x 1/q - X``; the explicit sum
over all q^(2N) global Kraus errors exists only as the brute-force oracle
:func:`convex_sum_oracle`.  Fixed-weight channels are evaluated exactly by
dynamic programming over marked site subsets (N*w single-site twirls instead
of Omega(w) error applications), or spectrally through the Gram matrix of
the corrupted states when that is smaller than the Hilbert dimension.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import pauli
from .ensemble import EncodedState
from .errors import CapacityError
from .spectra import Spectrum, spectrum_from_values

DEFAULT_BUDGET_MB = 3072


def gamma_from_p(p: float, q: int = 2) -> float:
    """Dual strength gamma = q^2 p / (q^2 - 1)."""
    return q * q * p / (q * q - 1)


def p_from_gamma(gamma: float, q: int = 2) -> float:
    return (q * q - 1) * gamma / (q * q)


@dataclass(frozen=True)
class ChannelSpec:
    """What noise to apply: depolarizing(p), dual(gamma) or fixed_weight(w)."""

    kind: str
    p: float | None = None
    gamma: float | None = None
    w: int | None = None

    def __post_init__(self):
        if self.kind not in ("depolarizing", "dual", "fixed_weight"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.kind == "depolarizing" and not (self.p is not None and 0 <= self.p <= 1):
            raise ValueError("depolarizing channel needs p in [0, 1]")
        if self.kind == "dual" and not (self.gamma is not None and 0 <= self.gamma <= 1):
            raise ValueError("dual channel needs gamma in [0, 1]")
        if self.kind == "fixed_weight" and (self.w is None or self.w < 0):
            raise ValueError("fixed-weight channel needs w >= 0")

    def eta(self) -> float:
        """Suppression exponent eta = -2 log(1 - gamma)."""
        g = self.gamma if self.gamma is not None else gamma_from_p(self.p)
        return -2.0 * math.log1p(-g)


@dataclass
class DensityMatrix:
    """Dense density matrix with tensor-factor metadata."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    label: str = ""

    def validate(self, atol_herm=1e-12, atol_trace=1e-12, min_eig=-1e-9) -> None:
        m = self.matrix
        if m.shape != (int(np.prod(self.dims)),) * 2:
            raise ValueError(f"shape {m.shape} does not match dims {self.dims}")
        if np.abs(m - m.conj().T).max() > atol_herm:
            raise ValueError("matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > atol_trace:
            raise ValueError("trace differs from 1 beyond tolerance")
        if np.linalg.eigvalsh(m).min() < min_eig:
            raise ValueError("matrix has a negative eigenvalue beyond tolerance")


def _dims_for(rho: np.ndarray, q: int, dims: tuple[int, ...] | None) -> tuple[int, ...]:
    if dims is not None:
        return tuple(dims)
    n = round(math.log(rho.shape[0], q))
    if q**n != rho.shape[0]:
        raise ValueError(f"matrix dim {rho.shape[0]} is not a power of q={q}")
    return (q,) * n


def _site_view(rho: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    """Zero-copy 6D view (left, q, right, left, q, right) isolating one site."""
    left = int(np.prod(dims[:site], initial=1))
    right = int(np.prod(dims[site + 1:], initial=1))
    return rho.reshape(left, dims[site], right, left, dims[site], right)


def _site_trace(rho: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    t = _site_view(rho, dims, site)
    qi = dims[site]
    tr = t[:, 0, :, :, 0, :].copy()
    for i in range(1, qi):
        tr += t[:, i, :, :, i, :]
    return tr


def _site_replace(rho: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    """Tr_i(rho) x 1/q_i on the given site, other factors untouched."""
    qi = dims[site]
    tr = _site_trace(rho, dims, site)
    out = np.zeros_like(rho)
    ov = _site_view(out, dims, site)
    for i in range(qi):
        ov[:, i, :, :, i, :] = tr / qi
    return out


def _site_depolarize_inplace(out: np.ndarray, dims: tuple[int, ...], site: int, gamma: float) -> None:
    """out <- (1 - gamma) out + gamma Tr_i(out) x 1/q, single buffer."""
    qi = dims[site]
    tr = _site_trace(out, dims, site)
    out *= 1.0 - gamma
    ov = _site_view(out, dims, site)
    tr *= gamma / qi
    for i in range(qi):
        ov[:, i, :, :, i, :] += tr


def _check_sites(dims: tuple[int, ...], sites) -> list[int]:
    sites = list(range(len(dims))) if sites is None else list(sites)
    if any(s < 0 or s >= len(dims) for s in sites):
        raise ValueError(f"site outside the {len(dims)} tensor factors")
    return sites


def depolarize(rho: np.ndarray, p: float, q: int = 2, sites=None, dims=None) -> np.ndarray:
    """Apply the single-qudit depolarizing channel at rate p on each site.

    Sites commute, so the sequential order is irrelevant.  Trace and
    positivity are preserved exactly (up to roundoff).
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    return depolarize_dual(rho, gamma_from_p(p, q), q=q, sites=sites, dims=dims)


def depolarize_dual(rho: np.ndarray, gamma: float, q: int = 2, sites=None, dims=None) -> np.ndarray:
    """Replacement form of the depolarizing channel at dual strength gamma.

    (1 - gamma) rho + gamma Tr_i(rho) x 1/q per site; identical to
    :func:`depolarize` with p = (q^2 - 1) gamma / q^2.  In the Pauli basis
    this rescales each coefficient by (1 - gamma)^weight.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _dims_for(rho, q, dims)
    out = rho.copy()
    for s in _check_sites(dims, sites):
        _site_depolarize_inplace(out, dims, s, gamma)
    return out


def weight_probability(n: int, w: int, p: float) -> float:
    """Binomial weight distribution P_w = C(n, w) p^w (1-p)^(n-w)."""
    if w < 0 or w > n:
        raise ValueError(f"weight w={w} outside [0, {n}]")
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    return float(math.comb(n, w)) * p**w * (1.0 - p) ** (n - w)


def _site_twirl(rho: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    """sum over nonidentity labels of E rho E^dag on one site."""
    qi = dims[site]
    tr = _site_trace(rho, dims, site)
    out = -rho
    ov = _site_view(out, dims, site)
    tr *= float(qi)
    for i in range(qi):
        ov[:, i, :, :, i, :] += tr
    return out


def _site_twirl_accumulate(dst: np.ndarray, src: np.ndarray, dims: tuple[int, ...], site: int) -> None:
    """dst += sum over nonidentity labels of E src E^dag, without temporaries."""
    qi = dims[site]
    tr = _site_trace(src, dims, site)
    dst -= src
    dv = _site_view(dst, dims, site)
    tr *= float(qi)
    for i in range(qi):
        dv[:, i, :, :, i, :] += tr


def fixed_weight_apply_multi(
    rho: np.ndarray,
    weights,
    q: int = 2,
    sites=None,
    dims=None,
    budget_mb: float = DEFAULT_BUDGET_MB,
) -> dict[int, np.ndarray]:
    """Fixed-weight channel outputs for several weights in one DP sweep.

    One pass over the sites accumulates, for every j <= max(weights), the sum
    over all size-j site subsets of the composed single-site twirls; that is
    len(sites) * max(weights) twirls total instead of Omega(w) explicit error
    applications per weight.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _dims_for(rho, q, dims)
    sites = _check_sites(dims, sites)
    n = len(sites)
    weights = sorted(set(int(w) for w in weights))
    if not weights:
        raise ValueError("no weights requested")
    wmax = weights[-1]
    if weights[0] < 0 or wmax > n:
        raise ValueError(f"weights {weights} outside [0, {n}]")
    need_mb = (wmax + 1) * rho.size * 16 / 2**20
    if need_mb > budget_mb:
        raise CapacityError(
            f"DP needs ~{need_mb:.0f} MB > budget {budget_mb} MB; "
            "use fixed_weight_spectrum for spectra"
        )
    acc: list[np.ndarray | None] = [rho] + [None] * wmax
    for i, s in enumerate(sites):
        for j in range(min(i + 1, wmax), 0, -1):
            if acc[j - 1] is None:
                continue
            if acc[j] is None:
                acc[j] = _site_twirl(acc[j - 1], dims, s)
            else:
                _site_twirl_accumulate(acc[j], acc[j - 1], dims, s)
    return {w: acc[w] / pauli.omega(n, w, q) for w in weights}


def fixed_weight_apply(
    rho: np.ndarray,
    w: int,
    q: int = 2,
    sites=None,
    dims=None,
    budget_mb: float = DEFAULT_BUDGET_MB,
) -> np.ndarray:
    """Uniform average over all weight-w errors, exactly.

    Evaluated by dynamic programming over the number of marked sites:
    len(sites) * w single-site twirls and w+1 live matrices, rather than
    Omega(w) explicit error applications.
    """
    return fixed_weight_apply_multi(rho, [w], q=q, sites=sites, dims=dims, budget_mb=budget_mb)[w]


def fixed_weight_spectrum(
    psi: EncodedState,
    w: int,
    subsystem: str = "RQ",
    budget_mb: float = DEFAULT_BUDGET_MB,
) -> Spectrum:
    """Spectrum of the weight-w corrupted state on RQ or Q.

    When the number of corrupted vectors (Omega(w) on RQ, q^k Omega(w) on Q)
    is below the Hilbert dimension, the nonzero eigenvalues are read off the
    Gram matrix of those vectors; otherwise the dense channel output is
    diagonalized.  Either way the result is padded with zeros to the full
    dimension.
    """
    p = psi.params
    if subsystem not in ("RQ", "Q"):
        raise ValueError(f"subsystem must be 'RQ' or 'Q', got {subsystem!r}")
    if w < 0 or w > p.N:
        raise ValueError(f"weight w={w} outside [0, {p.N}]")
    om = pauli.omega(p.N, w, p.q)
    if subsystem == "RQ":
        dim, m = p.dim_rq, om
        base = psi.amplitudes[:, None]
        err_sites = range(p.k, p.k + p.N)
    else:
        dim, m = p.dim_q, p.q**p.k * om
        base = psi.codewords()
        err_sites = range(p.N)

    if m < dim:
        if (m * m + m * dim) * 16 / 2**20 > budget_mb:
            raise CapacityError(f"Gram matrix of {m} vectors exceeds budget {budget_mb} MB")
        cols = np.empty((dim, m), dtype=complex)
        j = 0
        for mu in pauli.enumerate_fixed_weight(p.N, w, p.q):
            for b in range(base.shape[1]):
                cols[:, j] = pauli.apply_error(base[:, b], mu, q=p.q, sites=err_sites)
                j += 1
        gram = cols.conj().T @ cols / m
        vals = np.linalg.eigvalsh(gram) if m < 256 else None
        if vals is None:
            from ._linalg import eigvalsh

            vals = eigvalsh(gram)
        return spectrum_from_values(vals, dim=dim)

    rho = psi.rho_rq() if subsystem == "RQ" else psi.rho_q()
    sites = err_sites if subsystem == "RQ" else None
    out = fixed_weight_apply(rho, w, q=p.q, sites=sites, budget_mb=budget_mb)
    from ._linalg import eigvalsh

    return spectrum_from_values(eigvalsh(out), dim=dim)


def convex_sum_oracle(rho: np.ndarray, p: float, q: int = 2, sites=None, dims=None) -> np.ndarray:
    """Brute-force depolarizing channel: explicit sum over all global errors.

    Builds every E as a dense Kronecker product and weights it by its exact
    probability.  Test oracle only; capped at 5 noisy sites.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _dims_for(rho, q, dims)
    sites = _check_sites(dims, sites)
    n = len(sites)
    if n > 5:
        raise CapacityError(f"oracle enumerates q^(2n) errors; n={n} > 5")
    if any(dims[s] != q for s in sites):
        raise ValueError("noisy sites must have dimension q")
    p_err = p / (q * q - 1)
    out = np.zeros_like(rho)
    singles = [pauli.single_pauli(v, q) for v in range(q * q)]
    for labels in itertools.product(range(q * q), repeat=n):
        op = np.eye(1, dtype=complex)
        for f, d in enumerate(dims):
            op = np.kron(op, singles[labels[sites.index(f)]] if f in sites else np.eye(d))
        prob = 1.0
        for v in labels:
            prob *= (1.0 - p) if v == 0 else p_err
        out += prob * (op @ rho @ op.conj().T)
    return out


def average_fidelity(rho_q: np.ndarray, p: float, q: int = 2) -> float:
    """Tr[rho_Q N_p(rho_Q)], the overlap of the code state with its noisy image."""
    noisy = depolarize(rho_q, p, q=q)
    return float(np.trace(rho_q @ noisy).real)
