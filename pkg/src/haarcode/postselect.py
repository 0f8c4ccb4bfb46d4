"""Postselection protocols on the corrupted code state.

Soft postselection reweights every eigenvalue of the system state through the
measurement operator M_alpha = sum_n lambda_n^((alpha-1)/2) |n><n| built in
the eigenbasis of the corrupted system state; acceptance probability is
Tr rho^alpha.  Hard postselection projects onto one weight band of the
hierarchical band decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import eigh, eigvalsh
from .spectra import BandDecomposition, Spectrum, entropy, spectrum_from_values


@dataclass
class PostselectedState:
    """Renormalized post-measurement state with its acceptance probability."""

    sigma: np.ndarray
    acceptance: float
    alpha: float | None = None
    w: int | None = None
    label: str = "Q"


def _eig_density(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = eigh(np.asarray(rho, dtype=complex))
    return np.clip(vals, 0.0, None), vecs


def acceptance_probability(rho_q, alpha: float) -> float:
    """Probability that soft postselection accepts, Tr rho^alpha."""
    if alpha < 1:
        raise ValueError(f"alpha={alpha} < 1 not supported")
    if isinstance(rho_q, Spectrum):
        vals = rho_q.values
    else:
        rho_q = np.asarray(rho_q)
        vals = np.clip(eigvalsh(rho_q), 0.0, None) if rho_q.ndim == 2 else np.asarray(rho_q)
    if math.isinf(alpha):
        return float(vals.max())
    return float((vals[vals > 0] ** alpha).sum())


def soft_reweight(
    rho_q: np.ndarray,
    rho_rq: np.ndarray | None = None,
    alpha: float = 2.0,
) -> PostselectedState | tuple[PostselectedState, PostselectedState]:
    """Apply the alpha-reweighting POVM and renormalize.

    The system state maps to rho^alpha / Tr rho^alpha.  When the joint state
    is supplied, the same M_alpha (lifted with the identity on the reference)
    is conjugated into it, and the partial trace of the result over the
    reference reproduces the reweighted system state.
    """
    if alpha < 1:
        raise ValueError(f"alpha={alpha} < 1 not supported")
    if math.isinf(alpha):
        raise ValueError("alpha=inf reweighting degenerates; project onto the top band instead")
    vals, vecs = _eig_density(rho_q)
    acc = float((vals[vals > 0] ** alpha).sum())
    pow_q = np.where(vals > 0, vals, 0.0) ** alpha
    sigma_q = (vecs * pow_q) @ vecs.conj().T / acc
    state_q = PostselectedState(sigma=sigma_q, acceptance=acc, alpha=alpha, label="Q")
    if rho_rq is None:
        return state_q

    dq = rho_q.shape[0]
    drq = rho_rq.shape[0]
    if drq % dq != 0:
        raise ValueError(f"joint dim {drq} is not a multiple of system dim {dq}")
    r = drq // dq
    half = np.where(vals > 0, vals, 0.0) ** ((alpha - 1.0) / 2.0)
    m_alpha = (vecs * half) @ vecs.conj().T
    lifted = np.kron(np.eye(r), m_alpha)
    sigma_rq = lifted @ np.asarray(rho_rq, dtype=complex) @ lifted
    sigma_rq /= acc
    state_rq = PostselectedState(sigma=sigma_rq, acceptance=acc, alpha=alpha, label="RQ")
    return state_q, state_rq


def soft_reweight_spectra(
    rho_q: np.ndarray,
    rho_rq: np.ndarray,
    alpha: float = 2.0,
    eig_q: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[Spectrum, Spectrum, float]:
    """Spectra of both reweighted states without forming them densely.

    The system spectrum is the elementwise power of the input spectrum; the
    joint state is rotated into the (reference x system-eigenbasis) frame
    where M_alpha is diagonal, so only the final eigensolve touches the full
    joint dimension.  A precomputed eigendecomposition of rho_q may be
    passed to share it across alphas.
    """
    if alpha < 1:
        raise ValueError(f"alpha={alpha} < 1 not supported")
    if math.isinf(alpha):
        raise ValueError("alpha=inf reweighting degenerates; project onto the top band instead")
    if eig_q is None:
        vals, vecs = _eig_density(np.asarray(rho_q, dtype=complex))
    else:
        vals, vecs = eig_q
    acc = float((vals[vals > 0] ** alpha).sum())
    spec_q = spectrum_from_values(vals**alpha / acc, dim=rho_q.shape[0])

    dq = rho_q.shape[0]
    drq = rho_rq.shape[0]
    r = drq // dq
    half = np.where(vals > 0, vals, 0.0) ** ((alpha - 1.0) / 2.0)
    # rotate the system factor into the eigenbasis with batched GEMMs:
    # (1 x V)^dag rho (1 x V), where the spectrum is unitarily invariant
    m = np.asarray(rho_rq, dtype=complex)
    t = np.matmul(vecs.conj().T[None, :, :], m.reshape(r, dq, drq))  # left rotate
    t = t.reshape(-1, dq) @ vecs                                      # right rotate
    w_mat = t.reshape(drq, drq)
    scale = np.tile(half, r)
    w_mat = scale[:, None] * w_mat * scale[None, :]
    spec_rq = spectrum_from_values(eigvalsh(w_mat) / acc, dim=drq)
    return spec_q, spec_rq, acc


def hard_band_postselect(
    rho_tilde: np.ndarray,
    bands: BandDecomposition,
    w: int,
) -> PostselectedState:
    """Project onto the weight-w band subspace and renormalize.

    Accepts the corrupted state either on the bands' own space or on the
    joint space (the projector is then lifted with the identity on the
    leading reference factor).
    """
    if w not in bands.blocks:
        raise ValueError(f"band w={w} not present in the decomposition")
    rho_tilde = np.asarray(rho_tilde, dtype=complex)
    block = bands.blocks[w]
    d = rho_tilde.shape[0]
    if d == bands.dim:
        basis = block
    elif d % bands.dim == 0:
        basis = np.kron(np.eye(d // bands.dim), block)
    else:
        raise ValueError(f"state dim {d} incompatible with band dim {bands.dim}")
    small = basis.conj().T @ rho_tilde @ basis
    acc = float(np.trace(small).real)
    if acc < 1e-14:
        raise ValueError(f"acceptance {acc:.2e} below 1e-14; degenerate postselection")
    sigma = basis @ (small / acc) @ basis.conj().T
    return PostselectedState(sigma=sigma, acceptance=acc, w=w, label="")


def postselected_coherent_info(
    state_q: PostselectedState,
    state_rq: PostselectedState,
    k: int | None = None,
    base: int = 2,
) -> float:
    """Coherent information of a matched pair of postselected states."""
    if state_q.alpha != state_rq.alpha or state_q.w != state_rq.w:
        raise ValueError(
            f"protocol mismatch: alpha {state_q.alpha} vs {state_rq.alpha}, "
            f"w {state_q.w} vs {state_rq.w}"
        )
    sq = spectrum_from_values(np.clip(eigvalsh(state_q.sigma), 0, None), state_q.sigma.shape[0])
    srq = spectrum_from_values(np.clip(eigvalsh(state_rq.sigma), 0, None), state_rq.sigma.shape[0])
    ic = entropy(sq, base=base) - entropy(srq, base=base)
    if k is not None and abs(ic) > k + 1e-6:
        raise ValueError(f"postselected coherent information {ic} outside [-{k}, {k}]")
    return ic
