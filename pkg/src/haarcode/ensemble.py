"""Haar-random encodings: sampling, the encoded pure state, and reductions.

k logical qudits are maximally entangled with a k-qudit reference R, padded
with N-k ancillas in |0>, and scrambled by a Haar-random unitary on the
N-qudit system Q.  Tensor factor order of the encoded state is [R, Q] with
R first, so the amplitude vector reshapes to a (q^k, q^N) matrix whose rows
are (scaled) codeword columns of U.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

# desk-scale ceiling on any dense Hilbert-space dimension (2^14)
DEFAULT_MAX_DIM = 16384

_DUMP_MAGIC = b"HRCSTATE"


def rng_stream(seed: int, sample_index: int = 0) -> np.random.Generator:
    """Counter-based stream derived from (seed, sample_index).

    Philox keys make streams for distinct sample indices independent and
    reproducible regardless of execution order, so parallel sampling gives
    the same draws as a sequential loop.
    """
    return np.random.Generator(np.random.Philox(key=[seed % 2**64, sample_index % 2**64]))


def haar_isometry(d: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """d x m orthonormal columns distributed as the first m columns of a
    Haar unitary (uniform on the Stiefel manifold).

    QR of a complex Ginibre matrix with the R-diagonal phase correction
    (Mezzadri's construction); without the correction QR output is not
    Haar-distributed.
    """
    if d < 1 or not 1 <= m <= d:
        raise ValueError(f"need 1 <= m <= d, got d={d}, m={m}")
    z = rng.standard_normal((d, m)) + 1j * rng.standard_normal((d, m))
    qmat, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return qmat * (diag / np.abs(diag))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a d x d unitary from the Haar measure."""
    return haar_isometry(d, d, rng)


@dataclass(frozen=True)
class CodeParams:
    """Code shape: N physical qudits, k logical qudits, qudit dimension q."""

    N: int
    k: int
    q: int = 2
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.N:
            raise ValueError(f"need 1 <= k <= N, got k={self.k}, N={self.N}")
        if self.q < 2:
            raise ValueError(f"qudit dimension must be >= 2, got {self.q}")

    @property
    def dim_q(self) -> int:
        return self.q**self.N

    @property
    def dim_rq(self) -> int:
        return self.q ** (self.N + self.k)


@dataclass
class EncodedState:
    """Normalized pure state on R x Q, factor order [R (k sites), Q (N sites)]."""

    amplitudes: np.ndarray
    params: CodeParams

    def as_matrix(self) -> np.ndarray:
        """(q^k, q^N) view: row r holds the Q amplitudes entangled with |r>_R."""
        p = self.params
        return self.amplitudes.reshape(p.q**p.k, p.q**p.N)

    def codewords(self) -> np.ndarray:
        """(q^N, q^k) orthonormal codeword basis spanning the code space."""
        p = self.params
        return np.sqrt(p.q**p.k) * self.as_matrix().T

    def rho_rq(self) -> np.ndarray:
        v = self.amplitudes
        return np.outer(v, v.conj())

    def rho_q(self) -> np.ndarray:
        m = self.as_matrix()
        return m.T @ m.conj()


def encode(params: CodeParams, rng: np.random.Generator, max_dim: int = DEFAULT_MAX_DIM) -> EncodedState:
    """Build the encoded state (1_R x U)(|Phi_RL> |0_A>) for a fresh Haar U.

    |Phi_RL> is the standard maximally entangled pair, |0_A> the all-zero
    ancilla state; any other fixed choices are equivalent after the Haar
    unitary.  The reduced state on Q is maximally mixed on a random
    q^k-dimensional code space.
    """
    if params.dim_rq > max_dim:
        raise CapacityError(f"q^(N+k) = {params.dim_rq} exceeds the dense budget {max_dim}")
    q, n, k = params.q, params.N, params.k
    # only the q^k codeword columns U|r>_L|0_A> of the Haar unitary enter the
    # state, and those columns are exactly a Haar isometry
    cols = haar_isometry(q**n, q**k, rng)
    amps = (cols.T / np.sqrt(q**k)).reshape(-1)
    return EncodedState(amplitudes=np.ascontiguousarray(amps), params=params)


def reduce_state(state: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Partial trace keeping the given tensor factors.

    Args:
        state: amplitude vector (a dyad is formed) or density matrix.
        dims: dimension of every tensor factor.
        keep: indices of factors to keep, in their original order.

    Returns:
        Density matrix on the kept factors; Hermitian, trace preserved.
    """
    keep = tuple(keep)
    if any(i < 0 or i >= len(dims) for i in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid subsystem mask {keep} for {len(dims)} factors")
    total = int(np.prod(dims))
    state = np.asarray(state)
    drop = tuple(i for i in range(len(dims)) if i not in keep)
    dkeep = int(np.prod([dims[i] for i in keep], initial=1))
    if state.ndim == 1:
        if state.size != total:
            raise ValueError(f"state size {state.size} does not match dims {dims}")
        t = state.reshape(dims).transpose(keep + drop).reshape(dkeep, -1)
        return t @ t.conj().T
    if state.shape != (total, total):
        raise ValueError(f"matrix shape {state.shape} does not match dims {dims}")
    nd = len(dims)
    t = state.reshape(dims + dims)
    perm = keep + drop + tuple(i + nd for i in keep) + tuple(i + nd for i in drop)
    ddrop = total // dkeep
    t = t.transpose(perm).reshape(dkeep, ddrop, dkeep, ddrop)
    return np.einsum("iaja->ij", t)


def save_state(path, state: EncodedState) -> None:
    """Binary dump: magic, N, k, q, seed header then interleaved re/im doubles."""
    p = state.params
    header = _DUMP_MAGIC + struct.pack("<qqqq", p.N, p.k, p.q, p.seed)
    inter = np.empty(2 * state.amplitudes.size)
    inter[0::2] = state.amplitudes.real
    inter[1::2] = state.amplitudes.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(inter.astype("<f8").tobytes())


def load_state(path) -> EncodedState:
    with open(path, "rb") as fh:
        magic = fh.read(len(_DUMP_MAGIC))
        if magic != _DUMP_MAGIC:
            raise ValueError(f"not a state dump (bad magic {magic!r})")
        n, k, q, seed = struct.unpack("<qqqq", fh.read(32))
        raw = np.frombuffer(fh.read(), dtype="<f8")
    amps = raw[0::2] + 1j * raw[1::2]
    params = CodeParams(N=n, k=k, q=q, seed=seed)
    if amps.size != params.dim_rq:
        raise ValueError("dump payload does not match header dimensions")
    return EncodedState(amplitudes=amps, params=params)
