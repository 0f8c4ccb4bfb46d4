"""Spectra, entropies, coherent information, and the band-subspace hierarchy."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pauli
from ._linalg import eigvalsh
from .ensemble import EncodedState
from .errors import CapacityError

# eigenvalues below this fraction of the largest are clamped to zero
ZERO_CUTOFF = 1e-12
# relative singular-value threshold for numerical rank decisions
RANK_TOL = 1e-8


@dataclass
class Spectrum:
    """Descending eigenvalues with trace bookkeeping.

    values are clamped (negatives and entries below ZERO_CUTOFF * max set to
    zero); trace records the raw sum before clamping.
    """

    values: np.ndarray
    dim: int
    trace: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    @property
    def max(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0


def spectrum_from_values(vals: np.ndarray, dim: int | None = None) -> Spectrum:
    """Clamp, sort descending, and zero-pad raw eigenvalues."""
    vals = np.asarray(vals, dtype=float)
    raw_trace = float(vals.sum())
    vals = vals.copy()
    if vals.size:
        cutoff = ZERO_CUTOFF * max(vals.max(), 0.0)
        vals[vals < cutoff] = 0.0
    vals = np.sort(vals)[::-1]
    if dim is not None and dim > vals.size:
        vals = np.concatenate([vals, np.zeros(dim - vals.size)])
    return Spectrum(values=vals, dim=dim if dim is not None else vals.size, trace=raw_trace)


def spectrum(rho: np.ndarray, check_hermitian: float = 1e-8) -> Spectrum:
    """Full spectrum of a Hermitian matrix, clamped and sorted descending."""
    rho = np.asarray(rho)
    if np.abs(rho - rho.conj().T).max() > check_hermitian:
        raise ValueError("input is not Hermitian within 1e-8")
    return spectrum_from_values(eigvalsh(rho), dim=rho.shape[0])


def reconstruction_residual(rho: np.ndarray) -> float:
    """Diagnostic: max-entry residual of the eigendecomposition V L V^dag."""
    from ._linalg import eigh

    rho = np.asarray(rho)
    vals, vecs = eigh(rho)
    return float(np.abs(rho - (vecs * vals) @ vecs.conj().T).max())


def entropy(spec: Spectrum | np.ndarray, alpha: float = 1.0, base: int = 2) -> float:
    """Renyi-alpha entropy in units of log base q.

    alpha = 1 is von Neumann with the 0 log 0 = 0 convention; alpha = inf is
    -log_q of the largest eigenvalue.  alpha < 1 is rejected: the reweighting
    protocol that gives these entropies operational meaning is only a valid
    measurement for alpha >= 1.
    """
    if alpha < 1:
        raise ValueError(f"alpha={alpha} < 1 not supported")
    vals = spec.values if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    vals = vals[vals > 0]
    lq = math.log(base)
    if math.isinf(alpha):
        return -math.log(vals.max()) / lq
    if alpha == 1:
        return float(-(vals * np.log(vals)).sum() / lq)
    return float(math.log((vals**alpha).sum()) / ((1.0 - alpha) * lq))


def coherent_information(
    spec_q: Spectrum | np.ndarray,
    spec_rq: Spectrum | np.ndarray,
    k: int | None = None,
    alpha: float = 1.0,
    base: int = 2,
) -> float:
    """S_alpha(Q) - S_alpha(RQ); ranges over [-k, k] for the code states."""
    ic = entropy(spec_q, alpha=alpha, base=base) - entropy(spec_rq, alpha=alpha, base=base)
    if k is not None and abs(ic) > k + 1e-6:
        raise ValueError(f"coherent information {ic} outside [-{k}, {k}]")
    return ic


@dataclass
class BandDecomposition:
    """Hierarchical weight-band subspaces of the corrupted state.

    blocks[w] holds orthonormal columns spanning the new directions opened by
    weight-w errors after projecting out all lower bands.  Bands fill the
    space in order; the final, partially filled band (the reservoir) is
    where the cumulative error count first exceeds the dimension.
    """

    subsystem: str
    dim: int
    weights: list[int]
    blocks: dict[int, np.ndarray]
    ranks: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.ranks:
            self.ranks = {w: self.blocks[w].shape[1] for w in self.weights}

    @property
    def total_rank(self) -> int:
        return sum(self.ranks.values())

    @property
    def residual_rank(self) -> int:
        """Dimensions not captured by any computed band."""
        return self.dim - self.total_rank

    def projector(self, w: int) -> np.ndarray:
        b = self.blocks[w]
        return b @ b.conj().T


def _orthonormalize_against(vecs: np.ndarray, basis: np.ndarray | None) -> np.ndarray:
    """Project out an orthonormal basis, then rank-truncate by SVD.

    Two projection passes (twice is enough) keep the residual orthogonal to
    the basis at working precision even when vecs lie close to its span.
    """
    v = vecs
    if basis is not None and basis.size:
        for _ in range(2):
            v = v - basis @ (basis.conj().T @ v)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return u[:, :0]
    rank = int((s > RANK_TOL * s[0]).sum())
    return u[:, :rank]


def band_projectors(
    psi: EncodedState,
    w_max: int,
    subsystem: str = "RQ",
    budget_mb: float = 3072,
) -> BandDecomposition:
    """Build the weight-band hierarchy for one code sample.

    Band 0 is the uncorrupted space (the encoded state on RQ, the code space
    on Q); band w spans the weight-w corrupted vectors orthogonalized against
    everything below.  For w below the critical weight the rank equals the
    error count; the band where the space fills up is truncated and the
    hierarchy stops.
    """
    p = psi.params
    if subsystem not in ("RQ", "Q"):
        raise ValueError(f"subsystem must be 'RQ' or 'Q', got {subsystem!r}")
    if subsystem == "RQ":
        dim = p.dim_rq
        base = psi.amplitudes[:, None].copy()
        err_sites = range(p.k, p.k + p.N)
        mult = 1
    else:
        dim = p.dim_q
        base = psi.codewords()
        err_sites = range(p.N)
        mult = p.q**p.k

    blocks: dict[int, np.ndarray] = {0: _orthonormalize_against(base, None)}
    weights = [0]
    acc = blocks[0]
    for w in range(1, w_max + 1):
        if acc.shape[1] >= dim:
            break
        m = mult * pauli.omega(p.N, w, p.q)
        if (m * dim + dim * dim) * 16 / 2**20 > budget_mb:
            raise CapacityError(f"band w={w} needs {m} corrupted vectors; over budget")
        cols = np.empty((dim, m), dtype=complex)
        j = 0
        for mu in pauli.enumerate_fixed_weight(p.N, w, p.q):
            for b in range(base.shape[1]):
                cols[:, j] = pauli.apply_error(base[:, b], mu, q=p.q, sites=err_sites)
                j += 1
        block = _orthonormalize_against(cols, acc)
        room = dim - acc.shape[1]
        if block.shape[1] > room:
            block = block[:, :room]
        blocks[w] = block
        weights.append(w)
        acc = np.hstack([acc, block])
    return BandDecomposition(subsystem=subsystem, dim=dim, weights=weights, blocks=blocks)
