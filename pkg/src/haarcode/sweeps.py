"""Reproducible Monte Carlo sweeps, aggregation, and figure-data emission.

Every sample is drawn from a counter-based stream keyed by
(seed, N, k, q, sample index), so a given sample index reproduces the same
code at every grid point regardless of scheduling or execution order.
Observable records aggregate to mean and standard error and carry the
matching closed-form predictions alongside.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__, ansatz
from .channels import depolarize, fixed_weight_spectrum, gamma_from_p
from .ensemble import CodeParams, encode, reduce_state, rng_stream
from .errors import ConfigError
from .postselect import soft_reweight_spectra
from .spectra import entropy, spectrum_from_values
from ._linalg import eigvalsh

CSV_HEADER = (
    "N,k,q,p,alpha,samples,ic_mean,ic_stderr,s1q_mean,s1q_stderr,"
    "s1rq_mean,s1rq_stderr,s2q_mean,s2q_stderr,accept_mean,accept_stderr,"
    "ic_ansatz,s2q_ansatz"
)

MICRO_CSV_HEADER = (
    "N,k,q,w,samples,ic_mean,ic_stderr,s1q_mean,s1q_stderr,s1rq_mean,s1rq_stderr"
)

DEFAULT_MAX_N = 11
BIG_MAX_N = 13


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def sample_key(seed: int, N: int, k: int, q: int, sample: int) -> int:
    """Pack grid identity into the second Philox key word."""
    return (N << 56) | (k << 48) | (q << 40) | sample


def sample_code(N: int, k: int, q: int, seed: int, sample: int):
    params = CodeParams(N=N, k=k, q=q, seed=seed)
    return encode(params, rng_stream(seed, sample_key(seed, N, k, q, sample)))


def depolarized_state(psi, p: float):
    """Corrupted joint and system states for one code sample."""
    prm = psi.params
    dims = (prm.q,) * (prm.k + prm.N)
    rho_rq = depolarize(psi.rho_rq(), p, q=prm.q, sites=range(prm.k, prm.k + prm.N), dims=dims)
    rho_q = reduce_state(rho_rq, dims, keep=tuple(range(prm.k, prm.k + prm.N)))
    return rho_rq, rho_q


def depolarizing_observables(
    psi,
    p: float,
    alphas: tuple[float, ...] = (1.0,),
    postselect_alphas: tuple[float, ...] = (),
    plain: bool = True,
) -> dict:
    """All per-sample observables of the depolarizing channel at rate p.

    Returns von Neumann entropies of both corrupted states, coherent
    information, Renyi-2 entropy of the system state, acceptance
    probabilities for each alpha, and (optionally) the coherent information
    of the soft-postselected states.  plain=False skips the joint-state
    eigensolve when only postselected quantities are wanted.

    All inputs are Hermitian by construction, so spectra are taken directly
    from the eigensolver without the defensive hermiticity pass.
    """
    from ._linalg import eigh

    prm = psi.params
    rho_rq, rho_q = depolarized_state(psi, p)
    out = {"N": prm.N, "k": prm.k, "q": prm.q, "p": p}
    post_specs = {}
    if postselect_alphas:
        # one eigensolve of rho_q provides the spectrum and the POVM basis
        vals_q, vecs_q = eigh(rho_q)
        vals_q = np.clip(vals_q, 0.0, None)
        for a in postselect_alphas:
            sq, srq, acc = soft_reweight_spectra(rho_q, rho_rq, alpha=a, eig_q=(vals_q, vecs_q))
            post_specs[a] = (sq, srq, acc)
        spec_q = spectrum_from_values(vals_q, dim=rho_q.shape[0])
    else:
        spec_q = spectrum_from_values(eigvalsh(rho_q), dim=rho_q.shape[0])
    out["s1q"] = entropy(spec_q, base=prm.q)
    out["s2q"] = entropy(spec_q, alpha=2.0, base=prm.q)
    if plain:
        spec_rq = spectrum_from_values(eigvalsh(rho_rq), dim=rho_rq.shape[0])
        out["s1rq"] = entropy(spec_rq, base=prm.q)
        out["ic"] = out["s1q"] - out["s1rq"]
    vals = spec_q.values
    for a in alphas:
        out[f"accept_a{a:g}"] = float((vals[vals > 0] ** a).sum()) if a > 1 else 1.0
    for a, (sq, srq, acc) in post_specs.items():
        out[f"ic_post_a{a:g}"] = entropy(sq, base=prm.q) - entropy(srq, base=prm.q)
        out[f"svn_sigma_a{a:g}"] = entropy(sq, base=prm.q)
        out[f"accept_a{a:g}"] = acc
    return out


def fixed_weight_observables(psi, w: int, budget_mb: float = 3072) -> dict:
    """Coherent information and entropies of the weight-w error ensemble."""
    return fixed_weight_observables_multi(psi, [w], budget_mb=budget_mb)[w]


def fixed_weight_observables_multi(psi, weights, budget_mb: float = 3072) -> dict[int, dict]:
    """Fixed-weight observables for several weights on one code sample.

    Weights whose corrupted-vector count is below the Hilbert dimension go
    through the Gram path individually; the dense ones share a single DP
    sweep per subsystem.
    """
    from .channels import fixed_weight_apply_multi
    from .pauli import omega

    prm = psi.params
    weights = sorted(set(int(w) for w in weights))
    specs: dict[str, dict[int, object]] = {"Q": {}, "RQ": {}}
    for sub in ("Q", "RQ"):
        dim = prm.dim_q if sub == "Q" else prm.dim_rq
        mult = (prm.q**prm.k) if sub == "Q" else 1
        dense = [w for w in weights if mult * omega(prm.N, w, prm.q) >= dim]
        for w in weights:
            if w not in dense:
                specs[sub][w] = fixed_weight_spectrum(psi, w, sub, budget_mb=budget_mb)
        if dense:
            if sub == "RQ":
                rho, sites = psi.rho_rq(), range(prm.k, prm.k + prm.N)
            else:
                rho, sites = psi.rho_q(), None
            outs = fixed_weight_apply_multi(rho, dense, q=prm.q, sites=sites, budget_mb=budget_mb)
            for w, mat in outs.items():
                specs[sub][w] = spectrum_from_values(eigvalsh(mat), dim=dim)
    result = {}
    for w in weights:
        s1q = entropy(specs["Q"][w], base=prm.q)
        s1rq = entropy(specs["RQ"][w], base=prm.q)
        result[w] = {
            "N": prm.N, "k": prm.k, "q": prm.q, "w": w,
            "s1q": s1q, "s1rq": s1rq, "ic": s1q - s1rq,
        }
    return result


@dataclass
class ExperimentConfig:
    """Grid, sampling and budget parameters for one sweep."""

    n_list: list[int]
    k: int = 1
    q: int = 2
    p_grid: list[float] = field(default_factory=list)
    w_grid: list[int] = field(default_factory=list)
    alphas: list[float] = field(default_factory=lambda: [1.0])
    samples: int = 100
    seed: int = 0
    out_dir: str = "."
    budget_mb: float = 3072
    big: bool = False
    dump_samples: bool = False

    def __post_init__(self):
        if not self.n_list:
            raise ConfigError("empty N grid")
        if not self.p_grid and not self.w_grid:
            raise ConfigError("need a p grid or a w grid")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if any(not 0 <= p <= 1 for p in self.p_grid):
            raise ConfigError("p grid outside [0, 1]")
        cap = BIG_MAX_N if self.big else DEFAULT_MAX_N
        for n in self.n_list:
            if n > cap:
                raise ConfigError(f"N={n} above the {'--big ' if not self.big else ''}cap {cap}")
            if not 1 <= self.k <= n:
                raise ConfigError(f"need 1 <= k <= N, got k={self.k}, N={n}")
            dim = self.q ** (n + self.k)
            if dim * dim * 16 / 2**20 > self.budget_mb:
                raise ConfigError(f"N={n} joint dimension exceeds budget {self.budget_mb} MB")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls(**json.load(fh))


@dataclass
class SweepRecord:
    """Aggregated observables for one grid point, plus predictions.

    raw holds the per-sample values behind each aggregate so that the
    reported mean and standard error are independently recomputable.
    """

    N: int
    k: int
    q: int
    p: float
    alpha: float
    samples: int
    stats: dict[str, tuple[float, float]]
    ic_ansatz: float = 0.0
    s2q_ansatz: float = 0.0
    raw: dict[str, np.ndarray] | None = None

    def mean(self, key: str) -> float:
        return self.stats[key][0]

    def stderr(self, key: str) -> float:
        return self.stats[key][1]

    def csv_row(self) -> str:
        cells = [str(self.N), str(self.k), str(self.q), _fmt(self.p), _fmt(self.alpha), str(self.samples)]
        for key in ("ic", "s1q", "s1rq", "s2q", "accept"):
            m, e = self.stats.get(key, (0.0, 0.0))
            cells += [_fmt(m), _fmt(e)]
        cells += [_fmt(self.ic_ansatz), _fmt(self.s2q_ansatz)]
        return ",".join(cells)


def _aggregate(rows: list[dict], keys: list[str]) -> dict[str, tuple[float, float]]:
    out = {}
    for key in keys:
        vals = np.array([r[key] for r in rows if key in r], dtype=float)
        if vals.size == 0:
            continue
        mean = float(vals.mean())
        err = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        out[key] = (mean, err)
    return out


def run_sweep(config: ExperimentConfig, progress=None) -> list[SweepRecord]:
    """Depolarizing-channel sweep over (N, p) at the configured alphas.

    The largest alpha > 1 (if any) also gets the soft-postselected coherent
    information.  Deterministic for a fixed config and seed.
    """
    post_alphas = tuple(a for a in config.alphas if a > 1)
    alpha0 = max(post_alphas) if post_alphas else 1.0
    records = []
    for n in config.n_list:
        per_point: dict[float, list[dict]] = {p: [] for p in config.p_grid}
        for s in range(config.samples):
            psi = sample_code(n, config.k, config.q, config.seed, s)
            for p in config.p_grid:
                per_point[p].append(
                    depolarizing_observables(
                        psi, p, alphas=tuple(config.alphas), postselect_alphas=post_alphas
                    )
                )
            if progress:
                progress(n, s)
        for p in config.p_grid:
            rows = per_point[p]
            keys = sorted({key for r in rows for key in r} - {"N", "k", "q", "p"})
            stats = _aggregate(rows, keys)
            stats["accept"] = stats.get(f"accept_a{alpha0:g}", (1.0, 0.0))
            if f"ic_post_a{alpha0:g}" in stats:
                stats["ic_post"] = stats[f"ic_post_a{alpha0:g}"]
                stats["svn_sigma"] = stats[f"svn_sigma_a{alpha0:g}"]
            haar = ansatz.enumerator_haar(n, config.k, config.q)
            raw = None
            if config.dump_samples:
                raw = {key: np.array([r[key] for r in rows]) for key in keys}
            records.append(SweepRecord(
                N=n, k=config.k, q=config.q, p=p, alpha=alpha0, samples=config.samples,
                stats=stats,
                ic_ansatz=ansatz.coherent_info_leading(p, n, config.k, config.q),
                s2q_ansatz=ansatz.renyi2_from_enumerators(haar, gamma_from_p(p, config.q))[0],
                raw=raw,
            ))
    return records


def write_samples_npz(path, records: list[SweepRecord]) -> None:
    """Per-sample dump backing the aggregates (requires dump_samples=True)."""
    arrays = {}
    for i, rec in enumerate(records):
        if rec.raw is None:
            raise ValueError("records carry no per-sample data; set dump_samples")
        for key, vals in rec.raw.items():
            arrays[f"pt{i}_N{rec.N}_p{rec.p:g}_{key}"] = vals
    np.savez(path, **arrays)


def run_fixed_weight_sweep(config: ExperimentConfig, progress=None) -> list[dict]:
    """Fixed-weight ensemble sweep over (N, w); records are aggregated dicts."""
    records = []
    for n in config.n_list:
        grid = [w for w in config.w_grid if 0 <= w <= n]
        per_point: dict[int, list[dict]] = {w: [] for w in grid}
        for s in range(config.samples):
            psi = sample_code(n, config.k, config.q, config.seed, s)
            for w in grid:
                per_point[w].append(fixed_weight_observables(psi, w, budget_mb=config.budget_mb))
            if progress:
                progress(n, s)
        for w in grid:
            stats = _aggregate(per_point[w], ["ic", "s1q", "s1rq"])
            records.append({
                "N": n, "k": config.k, "q": config.q, "w": w,
                "samples": config.samples, "stats": stats,
            })
    return records


def write_sweep_csv(path, records: list[SweepRecord]) -> None:
    lines = [CSV_HEADER] + [r.csv_row() for r in records]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_micro_csv(path, records: list[dict]) -> None:
    lines = [MICRO_CSV_HEADER]
    for r in records:
        st = r["stats"]
        cells = [str(r["N"]), str(r["k"]), str(r["q"]), str(r["w"]), str(r["samples"])]
        for key in ("ic", "s1q", "s1rq"):
            m, e = st[key]
            cells += [_fmt(m), _fmt(e)]
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_manifest(path, config: ExperimentConfig, wall_seconds: float) -> None:
    try:
        import torch  # noqa: F401

        accel = "torch"
    except ImportError:
        accel = "numpy"
    manifest = {
        "config": asdict(config),
        "haarcode_version": __version__,
        "numpy_version": np.__version__,
        "eig_backend": accel,
        "wall_seconds": wall_seconds,
        "seed": config.seed,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Scaling collapse
# ---------------------------------------------------------------------------

def scaling_collapse(
    records,
    nu: float,
    p_c: float,
    value_key: str = "ic",
    grid_points: int = 50,
) -> tuple[list[dict], float]:
    """Rescale curves to x' = (p - p_c) N^(1/nu) and score their collapse.

    The score is the sum over a common x' grid of the squared deviations of
    each size's interpolated curve from the across-size mean; lower is a
    better collapse.  Needs at least three system sizes with overlapping
    rescaled ranges.
    """
    by_n: dict[int, list] = {}
    table = []
    for r in records:
        n, p = (r.N, r.p) if isinstance(r, SweepRecord) else (r["N"], r["p"])
        y = r.mean(value_key) if isinstance(r, SweepRecord) else r[value_key]
        xp = (p - p_c) * n ** (1.0 / nu)
        by_n.setdefault(n, []).append((xp, y))
        row = {"N": n, "p": p, value_key: y, "xprime": xp}
        table.append(row)
    if len(by_n) < 3:
        raise ValueError(f"collapse needs >= 3 system sizes, got {len(by_n)}")
    los, his = [], []
    curves = {}
    for n, pts in by_n.items():
        pts.sort()
        xs = np.array([x for x, _ in pts])
        ys = np.array([y for _, y in pts])
        curves[n] = (xs, ys)
        los.append(xs.min())
        his.append(xs.max())
    lo, hi = max(los), min(his)
    if not lo < hi:
        raise ValueError("rescaled curves do not overlap; cannot score collapse")
    grid = np.linspace(lo, hi, grid_points)
    ys = np.stack([np.interp(grid, *curves[n]) for n in sorted(curves)])
    score = float(((ys - ys.mean(axis=0)) ** 2).sum())
    return table, score


def zero_crossing(ps: np.ndarray, ys: np.ndarray) -> float:
    """Linear-interpolated p at which a decreasing curve crosses zero."""
    order = np.argsort(ps)
    ps, ys = np.asarray(ps, dtype=float)[order], np.asarray(ys, dtype=float)[order]
    sign = np.sign(ys)
    idx = np.where(sign[:-1] * sign[1:] <= 0)[0]
    if idx.size == 0:
        raise ValueError("curve does not cross zero on the sampled grid")
    i = idx[0]
    y0, y1 = ys[i], ys[i + 1]
    if y0 == y1:
        return float(ps[i])
    return float(ps[i] + (ps[i + 1] - ps[i]) * (y0 / (y0 - y1)))


# ---------------------------------------------------------------------------
# Figure data families
# ---------------------------------------------------------------------------

HIST_BINS = 60


def micro_band_histogram(
    N: int, k: int, q: int, w: int, samples: int, seed: int, budget_mb: float = 3072
):
    """Rescaled nonzero-eigenvalue histogram of the weight-w system state.

    Eigenvalues are rescaled to the mean nonzero eigenvalue
    1/min(q^N, q^k Omega(w)); 60 uniform bins over [0, 1.05 x_+] so the
    output is bit-for-bit reproducible.  Returns (bin_centers, density,
    mp_overlay, raw rescaled eigenvalues).
    """
    from .pauli import omega

    mult = q**k * omega(N, w, q)
    dim = q**N
    rank = min(dim, mult)
    c = dim / mult
    hi = 1.05 * ansatz.mp_edges(c)[1]
    edges = np.linspace(0.0, hi, HIST_BINS + 1)
    centers = 0.5 * (edges[1:] + edges[:-1])
    pooled = []
    for s in range(samples):
        psi = sample_code(N, k, q, seed, s)
        spec = fixed_weight_spectrum(psi, w, "Q", budget_mb=budget_mb)
        vals = spec.values[spec.values > 0] * rank
        pooled.append(vals)
    pooled = np.concatenate(pooled)
    hist, _ = np.histogram(pooled, bins=edges, density=True)
    overlay = ansatz.mp_rescaled_density(c, centers)
    return centers, hist, overlay, pooled


def canonical_band_table(N: int, k: int, q: int, p_grid, samples: int, seed: int):
    """Per-band eigenvalue summary of the depolarized system state.

    Bands are read off the sorted spectrum by multiplicity counting
    (q^k Omega(w) eigenvalues per band below the critical weight, the
    remainder in the reservoir).  Returns rows of
    (p, w, empirical mean, 10th and 90th percentiles, band-model mean).
    """
    from .pauli import omega

    wc = ansatz.critical_weight(N, k, q, "Q")
    rows = []
    for p in p_grid:
        model = ansatz.mean_shift_bands(p, N, k, q, "Q")
        pooled: dict[int, list] = {w: [] for w in range(wc + 1)}
        for s in range(samples):
            psi = sample_code(N, k, q, seed, s)
            _, rho_q = depolarized_state(psi, p)
            vals = np.sort(np.clip(eigvalsh(rho_q), 0, None))[::-1]
            start = 0
            for w in range(wc + 1):
                mult = q**k * omega(N, w, q) if w < wc else vals.size - start
                pooled[w].append(vals[start: start + mult])
                start += mult
        for w in range(wc + 1):
            vals = np.concatenate(pooled[w])
            mean_model = model.mean_of(w)
            rows.append({
                "p": p, "w": w,
                "mean_emp": float(vals.mean()),
                "p10": float(np.percentile(vals, 10)),
                "p90": float(np.percentile(vals, 90)),
                "mean_ansatz": mean_model,
                "is_reservoir": w == wc,
            })
    return rows
