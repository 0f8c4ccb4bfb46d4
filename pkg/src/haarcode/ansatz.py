"""Closed-form predictions: error entropies, Marchenko-Pastur band shapes,
mean-shift band models, critical weights, thresholds, Haar-averaged weight
enumerators, the MacWilliams duality, and postselected failure rates.

Counting is done in exact Python integers (no overflow at any N); ratios are
converted to float only at the end, and the per-error probability uses the
stable form P_w / Omega(w) = u^w (1-p)^N with u = p / ((q^2-1)(1-p)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "shannon_entropy",
    "mp_edges",
    "mp_density",
    "mp_rescaled_density",
    "mp_rescaled_cdf",
    "critical_weight",
    "BandRecord",
    "BandModel",
    "zeroth_order_bands",
    "mean_shift_bands",
    "band_model_density",
    "band_model_cdf",
    "coherent_info_leading",
    "renyi_entropy_leading",
    "w_star",
    "p_alpha",
    "threshold_solve",
    "EnumeratorPair",
    "enumerator_haar",
    "enumerator_from_phi",
    "macwilliams_check",
    "postselect_failure",
    "renyi2_from_enumerators",
    "reweighted_vn_leading",
    "u_of_p",
    "p_of_u",
]


def u_of_p(p: float, q: int = 2) -> float:
    """Relative per-error weight u = p / ((q^2-1)(1-p))."""
    return p / ((q * q - 1) * (1.0 - p))


def p_of_u(u: float, q: int = 2) -> float:
    c = (q * q - 1) * u
    return c / (1.0 + c)


def shannon_entropy(p: float, q: int = 2, alpha: float = 1.0) -> float:
    """Entropy of the single-site error distribution, in units of log_q.

    The distribution is (1-p) on the identity and p/(q^2-1) on each of the
    q^2-1 errors.  alpha=1 is the Shannon entropy, finite alpha the Renyi
    version, alpha=inf the min-entropy -log_q max(1-p, p/(q^2-1)).
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    if alpha < 1:
        raise ValueError(f"alpha={alpha} < 1 not supported")
    m = q * q - 1
    lq = math.log(q)
    if math.isinf(alpha):
        return -math.log(max(1.0 - p, p / m)) / lq
    if alpha == 1:
        h = 0.0
        if p < 1.0:
            h -= (1.0 - p) * math.log(1.0 - p)
        if p > 0.0:
            h -= p * math.log(p / m)
        return h / lq
    s = (1.0 - p) ** alpha + m * (p / m) ** alpha
    return math.log(s) / ((1.0 - alpha) * lq)


# ---------------------------------------------------------------------------
# Marchenko-Pastur band shapes
# ---------------------------------------------------------------------------

def mp_edges(c: float) -> tuple[float, float]:
    """Support edges x_pm = (1 pm c^-1/2)^2 of the rescaled MP density."""
    if c <= 0:
        raise ValueError(f"shape parameter c={c} must be positive")
    r = 1.0 / math.sqrt(c)
    return (1.0 - r) ** 2, (1.0 + r) ** 2


def mp_density(c: float, x) -> np.ndarray:
    """Raw MP density (1 / 2 pi x) sqrt((x+ - x)(x - x-)) on [x-, x+]."""
    lo, hi = mp_edges(c)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > lo) & (x < hi) & (x > 0)
    xi = x[inside]
    out[inside] = np.sqrt((hi - xi) * (xi - lo)) / (2.0 * np.pi * xi)
    return out


def mp_rescaled_density(c: float, x) -> np.ndarray:
    """MP density of eigenvalues rescaled to unit mean nonzero eigenvalue.

    c * mp_density for c >= 1 and mp_density for c < 1, which integrates to 1
    in both regimes without the zero-eigenvalue delta weight.
    """
    d = mp_density(c, x)
    return c * d if c >= 1.0 else d


def mp_rescaled_cdf(c: float, x, grid: int = 4001) -> np.ndarray:
    """CDF of the rescaled MP density by dense trapezoidal quadrature."""
    lo, hi = mp_edges(c)
    xs = np.linspace(lo, hi, grid)
    pdf = mp_rescaled_density(c, xs)
    cdf = np.concatenate([[0.0], np.cumsum((pdf[1:] + pdf[:-1]) * 0.5 * np.diff(xs))])
    cdf /= cdf[-1]
    return np.interp(np.asarray(x, dtype=float), xs, cdf, left=0.0, right=1.0)


# ---------------------------------------------------------------------------
# Critical weights and band models
# ---------------------------------------------------------------------------

def _omega_int(n: int, w: int, q: int) -> int:
    return (q * q - 1) ** w * math.comb(n, w)


def critical_weight(N: int, k: int, q: int = 2, subsystem: str = "RQ") -> int:
    """Smallest w whose cumulative error count reaches the Hilbert dimension.

    Threshold q^(N+k) for the joint system RQ, q^(N-k) for Q alone.
    """
    if subsystem not in ("RQ", "Q"):
        raise ValueError(f"subsystem must be 'RQ' or 'Q', got {subsystem!r}")
    threshold = q ** (N + k) if subsystem == "RQ" else q ** (N - k)
    total = 0
    for w in range(N + 1):
        total += _omega_int(N, w, q)
        if total >= threshold:
            return w
    raise AssertionError("unreachable: cumulative count always reaches q^(2N)")


@dataclass
class BandRecord:
    """One spectral band: multiplicity, mean eigenvalue, MP shape and shift."""

    w: int
    multiplicity: int
    mean: float
    mp_c: float
    width: float
    shift: float
    weight_prob: float
    is_reservoir: bool = False


@dataclass
class BandModel:
    """Per-weight analytic description of the corrupted spectrum."""

    subsystem: str
    N: int
    k: int
    q: int
    p: float
    records: list[BandRecord]
    reservoir: BandRecord | None = None

    def total_mass(self) -> float:
        mass = sum(r.multiplicity * r.mean for r in self.records)
        if self.reservoir is not None:
            mass += self.reservoir.multiplicity * self.reservoir.mean
        return mass

    def mean_of(self, w: int) -> float:
        for r in self.records:
            if r.w == w:
                return r.mean
        if self.reservoir is not None and self.reservoir.w == w:
            return self.reservoir.mean
        raise KeyError(f"no band at weight {w}")


def _band_frame(p, N, k, q, subsystem):
    if subsystem not in ("RQ", "Q"):
        raise ValueError(f"subsystem must be 'RQ' or 'Q', got {subsystem!r}")
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    dim = q ** (N + k) if subsystem == "RQ" else q**N
    mult_factor = 1 if subsystem == "RQ" else q**k
    # projection denominator: q^(N+k) for RQ, q^(N-k) for Q
    proj_dim = q ** (N + k) if subsystem == "RQ" else q ** (N - k)
    # positive shifts land per state: q^-(N+k) for RQ, q^-N for Q
    lift_dim = q ** (N + k) if subsystem == "RQ" else q**N
    return dim, mult_factor, proj_dim, lift_dim


def _band_record(w, pw, mult, om, c, width, mean, shift, reservoir=False) -> BandRecord:
    return BandRecord(
        w=w,
        multiplicity=mult,
        mean=mean,
        mp_c=c,
        width=width,
        shift=shift,
        weight_prob=pw,
        is_reservoir=reservoir,
    )


def zeroth_order_bands(p: float, N: int, k: int, q: int = 2, subsystem: str = "Q") -> BandModel:
    """Uncoupled bands: weight w carries P_w spread uniformly over its errors.

    All weights 0..N appear with multiplicity Omega(w) (RQ) or q^k Omega(w)
    (Q) and mean P_w / multiplicity, so the total mass is exactly 1.
    """
    dim, mf, _, _ = _band_frame(p, N, k, q, subsystem)
    records = []
    for w in range(N + 1):
        om = _omega_int(N, w, q)
        mult = mf * om
        pw = float(math.comb(N, w)) * p**w * (1 - p) ** (N - w)
        c = dim / mult
        width = 4.0 * pw / math.sqrt(mult * dim)
        records.append(_band_record(w, pw, mult, om, c, width, pw / mult, 0.0))
    return BandModel(subsystem=subsystem, N=N, k=k, q=q, p=p, records=records)


def mean_shift_bands(p: float, N: int, k: int, q: int = 2, subsystem: str = "Q") -> BandModel:
    """First-order interband corrections to the band means.

    Band w < w_c loses the fraction of its support already claimed by lower
    bands and gains the uniform floor leaked down by all higher weights:

        mean(w) = (P_w / mult(w)) (1 - sum_{w'<w} Omega(w') / proj_dim)
                  + sum_{w'>w} P_w' / lift_dim

    The partially filled reservoir band at w_c uses the same expression with
    its residual multiplicity, and the whole model is rescaled to unit trace
    (the untruncated sum is exactly trace preserving; truncation at the
    reservoir leaves a tiny deficit).
    """
    dim, mf, proj_dim, lift_dim = _band_frame(p, N, k, q, subsystem)
    wc = critical_weight(N, k, q, subsystem)
    pw_all = [float(math.comb(N, w)) * p**w * (1 - p) ** (N - w) for w in range(N + 1)]
    tail = np.concatenate([np.cumsum(pw_all[::-1])[::-1][1:], [0.0]])  # sum_{w'>w} P_w'

    records = []
    cum_omega = 0
    used = 0
    for w in range(wc):
        om = _omega_int(N, w, q)
        mult = mf * om
        depletion = 1.0 - cum_omega / proj_dim
        mean = (pw_all[w] / mult) * depletion + tail[w] / lift_dim
        c = dim / mult
        width = 4.0 * pw_all[w] / math.sqrt(mult * dim)
        records.append(_band_record(w, pw_all[w], mult, om, c, width, mean, mean - pw_all[w] / mult))
        cum_omega += om
        used += mult

    res_mult = dim - used
    depletion = 1.0 - cum_omega / proj_dim
    res_mean = (pw_all[wc] / res_mult) * depletion + tail[wc] / lift_dim
    res_width = 4.0 * pw_all[wc] / math.sqrt(res_mult * dim)
    reservoir = _band_record(
        wc, pw_all[wc], res_mult, _omega_int(N, wc, q), dim / res_mult, res_width,
        res_mean, res_mean - pw_all[wc] / res_mult, reservoir=True,
    )
    model = BandModel(subsystem=subsystem, N=N, k=k, q=q, p=p, records=records, reservoir=reservoir)
    mass = model.total_mass()
    for r in model.records:
        r.mean /= mass
    model.reservoir.mean /= mass
    return model


def band_model_density(record: BandRecord, x) -> np.ndarray:
    """Eigenvalue density of one band: the microcanonical MP shape scaled by
    P_w and rigidly shifted so its mean sits at the band-model mean."""
    x = np.asarray(x, dtype=float)
    if record.weight_prob <= 0.0:
        return np.zeros_like(x)
    scale = record.multiplicity / record.weight_prob
    return scale * mp_rescaled_density(record.mp_c, (x - record.shift) * scale)


def band_model_cdf(record: BandRecord, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if record.weight_prob <= 0.0:
        return (x >= 0).astype(float)
    scale = record.multiplicity / record.weight_prob
    return mp_rescaled_cdf(record.mp_c, (x - record.shift) * scale)


# ---------------------------------------------------------------------------
# Leading-order entropies, dominant weights, thresholds
# ---------------------------------------------------------------------------

def coherent_info_leading(p: float, N: int, k: int, q: int = 2) -> float:
    """Large-N coherent information: k, -k, or the linear ramp in between."""
    h = shannon_entropy(p, q)
    if h <= 1.0 - k / N:
        return float(k)
    if h >= 1.0 + k / N:
        return float(-k)
    return N * (1.0 - h)


def renyi_entropy_leading(
    p: float, alpha: float, N: int, k: int, q: int = 2, subsystem: str = "Q"
) -> float:
    """Haar-averaged Renyi entropy at leading order in N.

    k + N H_alpha(p) capped at N for the system, N H_alpha(p) capped at N + k
    for system plus reference.
    """
    h = shannon_entropy(p, q, alpha)
    if subsystem == "Q":
        return min(k + N * h, float(N))
    if subsystem == "RQ":
        return min(N * h, float(N + k))
    raise ValueError(f"subsystem must be 'RQ' or 'Q', got {subsystem!r}")


def p_alpha(p: float, alpha: float, q: int = 2) -> float:
    """Effective error rate after alpha-reweighting the error distribution."""
    if alpha < 1:
        raise ValueError(f"alpha={alpha} < 1 not supported")
    if not 0 <= p < 1:
        raise ValueError(f"p={p} outside [0, 1)")
    m = q * q - 1
    if math.isinf(alpha):
        if p / m < 1.0 - p:
            return 0.0
        if p / m > 1.0 - p:
            return 1.0
        return m / (m + 1.0)
    err = m * (p / m) ** alpha
    return err / ((1.0 - p) ** alpha + err)


def w_star(p: float, alpha: float, N: int, q: int = 2) -> float:
    """Dominant error weight in the alpha-reweighted state, w* = N p_alpha."""
    return N * p_alpha(p, alpha, q)


def _bisect(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}] (f: {flo:.3g}, {fhi:.3g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def threshold_solve(
    kind: str,
    k_over_N: float = 0.0,
    q: int = 2,
    alpha: float | None = None,
    w_over_N: float | None = None,
    rate: float | None = None,
) -> float:
    """Solve a coding threshold for the error rate p.

    kind="renyi":        H_alpha(p) = 1 - k/N.
    kind="postselected": crossing of the weight-w error probability with the
        weight-w band fraction, the upper root of
        -(w/N) log_q(p / (q^2-1)) - (1 - w/N) log_q(1-p) = 1 - k/N.
    kind="detection":    closed form 1 - q^(rate - 1).
    """
    eps = 1e-12
    p_max = 1.0 - 1.0 / (q * q)
    if kind == "renyi":
        if alpha is None:
            raise ValueError("renyi threshold needs alpha")
        target = 1.0 - k_over_N
        return _bisect(lambda p: shannon_entropy(p, q, alpha) - target, eps, p_max - eps)
    if kind == "postselected":
        if w_over_N is None:
            raise ValueError("postselected threshold needs w_over_N")
        nu = w_over_N
        target = 1.0 - k_over_N
        lq = math.log(q)

        def g(p):
            val = -(1.0 - nu) * math.log1p(-p) / lq
            if nu > 0:
                val -= nu * math.log(p / (q * q - 1)) / lq
            return val - target

        return _bisect(g, max(nu, eps), p_max)
    if kind == "detection":
        if rate is None:
            raise ValueError("detection threshold needs rate")
        return 1.0 - float(q) ** (rate - 1.0)
    raise ValueError(f"unknown threshold kind {kind!r}")


# ---------------------------------------------------------------------------
# Weight enumerators and the MacWilliams duality
# ---------------------------------------------------------------------------

@dataclass
class EnumeratorPair:
    """The pair of weight enumerator polynomials A(u), B(u) of a code.

    Numeric pairs evaluate the polynomials from per-weight coefficient mass
    (phi arrays); the Haar pair uses the exact two-design average, a single
    binomial profile pinned by A(0) = 1 and A(1) = q^(N-k).
    """

    N: int
    k: int
    q: int
    phi_identity: np.ndarray | None = None
    phi_total: np.ndarray | None = None

    @property
    def analytic(self) -> bool:
        return self.phi_identity is None

    @property
    def haar_constant(self) -> float:
        qq = self.q
        return (qq ** (self.N - self.k) - 1) / (qq ** (2 * self.N) - 1)

    def _binom_term(self, u):
        return (1.0 + (self.q * self.q - 1) * np.asarray(u, dtype=float)) ** self.N

    def A(self, u):
        if self.analytic:
            a = self.haar_constant
            return 1.0 - a + a * self._binom_term(u)
        return np.polynomial.polynomial.polyval(np.asarray(u, dtype=float), self.phi_identity)

    def B(self, u):
        qq = self.q
        if self.analytic:
            a = self.haar_constant
            return qq ** (self.N + self.k) * a + qq ** (self.k - self.N) * (1.0 - a) * self._binom_term(u)
        return np.polynomial.polynomial.polyval(np.asarray(u, dtype=float), self.phi_total)


def enumerator_haar(N: int, k: int, q: int = 2) -> EnumeratorPair:
    """Exact Haar-averaged enumerator pair."""
    return EnumeratorPair(N=N, k=k, q=q)


def enumerator_from_phi(phi_identity, phi_total, N: int, k: int, q: int = 2) -> EnumeratorPair:
    """Numeric enumerator pair from per-weight coefficient masses."""
    return EnumeratorPair(
        N=N, k=k, q=q,
        phi_identity=np.asarray(phi_identity, dtype=float),
        phi_total=np.asarray(phi_total, dtype=float),
    )


def macwilliams_check(pair: EnumeratorPair, u) -> tuple[np.ndarray, float]:
    """Residuals of the enumerator duality at u and of the fixed-point crossing.

    residual1 = A((1-u) / (1 + (q^2-1) u)) - q^(N-k) (1 + (q^2-1) u)^-N B(u)
    residual2 = A(u*) - q^-k B(u*) at the self-dual point u* = 1/(q+1).

    Both vanish identically for the enumerators of any valid code state.
    """
    q, N, k = pair.q, pair.N, pair.k
    u = np.asarray(u, dtype=float)
    m = 1.0 + (q * q - 1) * u
    res1 = pair.A((1.0 - u) / m) - q ** (N - k) * m ** (-N) * pair.B(u)
    ustar = 1.0 / (q + 1.0)
    res2 = float(pair.A(ustar) - pair.B(ustar) / q**k)
    return res1, res2


def postselect_failure(pair: EnumeratorPair, u: float) -> float:
    """Failure probability after postselecting on the zero syndrome,
    (q^k / (q^k + 1)) (1 - A(u) / B(u)) at u = p / ((q^2-1)(1-p))."""
    if not 0 <= u <= 1:
        raise ValueError(f"u={u} outside [0, 1]")
    qk = float(pair.q**pair.k)
    return qk / (qk + 1.0) * (1.0 - float(pair.A(u)) / float(pair.B(u)))


def renyi2_from_enumerators(pair: EnumeratorPair, gamma: float) -> tuple[float, float, float]:
    """Renyi-2 entropies and coherent information from the enumerators.

    The depolarizing channel rescales per-weight coefficient mass by
    (1-gamma)^(2w), so the purities are Tr rho_Q^2 = q^-N A((1-gamma)^2) and
    Tr rho_RQ^2 = q^-(N+k) B((1-gamma)^2), giving

        S2(Q)  = N - log_q A((1-gamma)^2)
        S2(RQ) = N + k - log_q B((1-gamma)^2)
        Ic2    = log_q(B/A) - k

    which recovers S2(Q) = k, S2(RQ) = 0 at gamma = 0 and crosses Ic2 = 0 at
    gamma = 1 - 1/sqrt(q+1).
    """
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma={gamma} outside [0, 1]")
    u = (1.0 - gamma) ** 2
    lq = math.log(pair.q)
    a, b = float(pair.A(u)), float(pair.B(u))
    s2q = pair.N - math.log(a) / lq
    s2rq = pair.N + pair.k - math.log(b) / lq
    return s2q, s2rq, math.log(b / a) / lq - pair.k


def reweighted_vn_leading(p: float, alpha: float, N: int, k: int, q: int = 2) -> float:
    """Leading-N von Neumann entropy of the alpha-reweighted system state.

    N H(w*(p, alpha)/N) + k below the alpha threshold, N above; for alpha > 1
    the two branches do not meet (jump discontinuity).
    """
    pc = threshold_solve("renyi", k_over_N=k / N, q=q, alpha=alpha)
    if p > pc:
        return float(N)
    return N * shannon_entropy(p_alpha(p, alpha, q), q) + k
