"""Generalized Pauli operators on N qudits and weight-resolved operator algebra.

Single-qudit operators are the clock-shift family ``X^a Z^b`` with
``X|j> = |j+1 mod q>`` and ``Z|j> = w^j |j>``, ``w = exp(2 pi i / q)``.
A nonzero label ``v`` in ``1..q^2-1`` decodes as ``(a, b) = divmod(v, q)``;
``v = 0`` is the identity.  These q^2 operators are unitary and mutually
trace-orthogonal, ``Tr(E_u^dag E_v) = q * delta_uv``, which is all the
decomposition machinery below relies on.

A multi-qudit error is a :class:`PauliIndex`, one label per site; its weight
is the number of nonzero labels.  :func:`pauli_spectrum` decomposes a density
matrix into this operator basis and aggregates the squared coefficients into
per-weight sums phi(w), optionally resolved over a logical/system split.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError

# decomposition caps: coefficient tensors hold (q^2)^d entries
MAX_SITES_QUBIT = 12
MAX_SITES_QUDIT = 8


def omega(n: int, w: int, q: int = 2) -> int:
    """Number of distinct weight-w errors on n qudits, (q^2-1)^w * C(n, w).

    Exact integer arithmetic; no overflow for any sane n.
    """
    if q < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {q}")
    if w < 0 or w > n:
        raise ValueError(f"weight w={w} outside [0, {n}]")
    return (q * q - 1) ** w * math.comb(n, w)


def single_pauli(v: int, q: int = 2) -> np.ndarray:
    """Dense q x q matrix for the single-qudit operator with label v."""
    if not 0 <= v < q * q:
        raise ValueError(f"label v={v} outside [0, {q*q - 1}]")
    a, b = divmod(v, q)
    j = np.arange(q)
    z = np.exp(2j * np.pi * b * j / q)
    op = np.zeros((q, q), dtype=complex)
    op[(j + a) % q, j] = z
    return op


@dataclass(frozen=True)
class PauliIndex:
    """A multi-qudit Pauli error: one label in {0..q^2-1} per site."""

    entries: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(1 for v in self.entries if v != 0)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.entries) if v != 0)

    @classmethod
    def from_support(cls, n: int, sites: Sequence[int], labels: Sequence[int]) -> "PauliIndex":
        entries = [0] * n
        for s, v in zip(sites, labels):
            entries[s] = v
        return cls(tuple(entries))


def _num_factors(size: int, q: int) -> int:
    n = round(math.log(size, q))
    if q**n != size:
        raise ValueError(f"state size {size} is not a power of q={q}")
    return n


def apply_error(
    state: np.ndarray,
    mu: PauliIndex,
    q: int = 2,
    sites: Sequence[int] | None = None,
) -> np.ndarray:
    """Apply the error E_mu to an amplitude vector.

    Args:
        state: complex vector of length q^n over n tensor factors.
        mu: error labels, one per addressed site.
        sites: which tensor factors the labels address; defaults to all,
            in which case len(mu.entries) must equal n.

    Returns:
        E_mu |state>, same shape.  Norm is preserved (E_mu is unitary).
    """
    state = np.asarray(state)
    n = _num_factors(state.size, q)
    if sites is None:
        sites = range(n)
    sites = list(sites)
    if len(sites) != len(mu.entries):
        raise ValueError(f"{len(mu.entries)} labels for {len(sites)} sites")
    if any(s < 0 or s >= n for s in sites):
        raise ValueError("site index outside the state's tensor factors")
    out = state.reshape((q,) * n).astype(complex)
    w = np.exp(2j * np.pi / q)
    for s, v in zip(sites, mu.entries):
        if v == 0:
            continue
        a, b = divmod(v, q)
        if b:
            phase = w ** (b * np.arange(q))
            shape = [1] * n
            shape[s] = q
            out = out * phase.reshape(shape)
        if a:
            out = np.roll(out, a, axis=s)
    return out.reshape(state.shape)


def enumerate_fixed_weight(n: int, w: int, q: int = 2) -> Iterator[PauliIndex]:
    """Yield every weight-w error on n qudits exactly once.

    Order: ascending lexicographic in the support (site combination), then
    ascending per-site labels (itertools.product order).  Total count is
    omega(n, w, q).
    """
    if w < 0 or w > n:
        raise ValueError(f"weight w={w} outside [0, {n}]")
    labels = range(1, q * q)
    for support in itertools.combinations(range(n), w):
        for vals in itertools.product(labels, repeat=w):
            yield PauliIndex.from_support(n, support, vals)


def _weights_of_flat_indices(d: int, q: int) -> np.ndarray:
    """Weight (count of nonzero base-q^2 digits) for flat indices 0..(q^2)^d-1."""
    q2 = q * q
    idx = np.arange(q2**d, dtype=np.int64)
    w = np.zeros(q2**d, dtype=np.int64)
    for _ in range(d):
        w += (idx % q2) != 0
        idx //= q2
    return w


@dataclass
class PauliSpectrum:
    """Pauli-basis decomposition of an operator with per-weight coefficient mass.

    coeffs[v_1, ..., v_d] = Tr(S^dag rho) for S = E_{v_1} x ... x E_{v_d};
    phi(w) sums |coeff|^2 over strings of weight w.  When the operator lives
    on a reference/system split (first ``logical_split`` factors are the
    reference), phi_logical[L, w] resolves the coefficient mass by reference
    string L and system weight w; phi_identity is its identity row and
    phi_total its sum over L.  These are the numeric inputs of the weight
    enumerator polynomials.
    """

    q: int
    num_sites: int
    coeffs: np.ndarray
    phi: np.ndarray
    logical_split: int | None = None
    phi_identity: np.ndarray | None = None
    phi_total: np.ndarray | None = None
    phi_logical: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        """Rebuild the operator, q^-d sum_S a_S S.  Intended for small d."""
        q, d = self.q, self.num_sites
        q2 = q * q
        basis = np.stack([single_pauli(v, q) for v in range(q2)])  # (q2, q, q)
        a = self.coeffs.reshape((q2,) * d)
        # contract one site label at a time; axis bookkeeping as in _transform
        t = a
        for _ in range(d):
            t = np.tensordot(t, basis, axes=([0], [0]))  # appends (q, q)
        # axes now (n_1, m_1, ..., n_d, m_d); interleave back to matrix
        perm = list(range(0, 2 * d, 2)) + list(range(1, 2 * d, 2))
        t = t.transpose(perm)
        dim = q**d
        return t.reshape(dim, dim) / dim


def _coefficient_tensor(rho: np.ndarray, q: int, d: int) -> np.ndarray:
    """All q^(2d) Pauli coefficients a_S = Tr(S^dag rho), axis per site."""
    q2 = q * q
    # W[v, n*q + m] = conj(E_v[n, m]); one row per single-site label
    W = np.stack([single_pauli(v, q).conj().reshape(q2) for v in range(q2)])
    # pair up (row, col) indices per site: (n_1, m_1, n_2, m_2, ...)
    a = rho.reshape((q,) * (2 * d))
    perm = [x for t in range(d) for x in (t, d + t)]
    a = a.transpose(perm).reshape((q2,) * d)
    # transform the leading axis, rotate it to the back, repeat d times
    for _ in range(d):
        a = (W @ a.reshape(q2, -1)).reshape(a.shape)
        a = np.moveaxis(a, 0, -1)
    return a


def pauli_spectrum(
    rho: np.ndarray,
    q: int = 2,
    logical_split: int | None = None,
) -> PauliSpectrum:
    """Decompose a density matrix into generalized Pauli strings.

    Args:
        rho: square matrix on d qudits, rho = q^-d sum_S a_S S with
            a_S = Tr(S^dag rho); a_I = Tr(rho) = 1 for trace-1 input.
        logical_split: if set to k, the first k factors are treated as the
            reference and phi arrays resolved by system weight are attached.

    Returns:
        PauliSpectrum with phi(w) = sum_{S at weight w} |a_S|^2, satisfying
        sum_w phi(w) = q^d Tr(rho^2).

    Raises:
        CapacityError: if d exceeds the documented cap (12 qubit sites,
            8 qudit sites), where the coefficient tensor would not fit.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    d = _num_factors(rho.shape[0], q)
    cap = MAX_SITES_QUBIT if q == 2 else MAX_SITES_QUDIT
    if d > cap:
        raise CapacityError(f"{d} sites exceeds the q={q} decomposition cap of {cap}")
    q2 = q * q
    a = _coefficient_tensor(rho, q, d)
    mass = np.abs(a.reshape(-1)) ** 2
    wts = _weights_of_flat_indices(d, q)
    phi = np.bincount(wts, weights=mass, minlength=d + 1)[: d + 1]

    phi_id = phi_tot = phi_log = None
    if logical_split is not None:
        k = logical_split
        if not 0 < k < d:
            raise ValueError(f"logical_split={k} outside (0, {d})")
        ns = d - k
        wts_sys = _weights_of_flat_indices(ns, q)
        mass = (np.abs(a) ** 2).reshape(q2**k, q2**ns)
        phi_log = np.stack(
            [np.bincount(wts_sys, weights=row, minlength=ns + 1)[: ns + 1] for row in mass]
        )
        phi_id = phi_log[0]
        phi_tot = phi_log.sum(axis=0)

    return PauliSpectrum(
        q=q,
        num_sites=d,
        coeffs=a,
        phi=phi,
        logical_split=logical_split,
        phi_identity=phi_id,
        phi_total=phi_tot,
        phi_logical=phi_log,
    )
