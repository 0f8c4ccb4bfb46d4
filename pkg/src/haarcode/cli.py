"""Command-line entry point: sweeps, figure data, analytics, selftest.

Exit codes: 0 success, 2 configuration error, 3 capacity (budget) error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import ansatz
from .errors import CapacityError, ConfigError
from .sweeps import (
    ExperimentConfig,
    _fmt,
    canonical_band_table,
    micro_band_histogram,
    run_fixed_weight_sweep,
    run_sweep,
    write_manifest,
    write_micro_csv,
    write_sweep_csv,
)

DEFAULT_ALPHA_GRID = (1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, 32.0, 64.0)


def _add_common(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--config", type=Path, help="JSON config file; flags override")
    ap.add_argument("--n", type=int, nargs="+", help="system sizes")
    ap.add_argument("--k", type=int, help="logical qudits")
    ap.add_argument("--q", type=int, help="qudit dimension")
    ap.add_argument("--p-grid", type=float, nargs="+", help="error rates")
    ap.add_argument("--w-grid", type=int, nargs="+", help="error weights")
    ap.add_argument("--alpha", type=float, nargs="+", help="Renyi/reweighting indices")
    ap.add_argument("--samples", type=int, help="codes per grid point")
    ap.add_argument("--seed", type=int, help="base seed")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--budget-mb", type=float, help="dense-matrix memory budget")
    ap.add_argument("--big", action="store_true", help="allow N up to 13")
    ap.add_argument("--dump-samples", action="store_true",
                    help="also write per-sample observables (samples.npz)")


def _build_config(args) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw.update(json.load(fh))
    for key, attr in [
        ("n_list", "n"), ("k", "k"), ("q", "q"), ("p_grid", "p_grid"),
        ("w_grid", "w_grid"), ("alphas", "alpha"), ("samples", "samples"),
        ("seed", "seed"), ("budget_mb", "budget_mb"),
    ]:
        val = getattr(args, attr, None)
        if val is not None:
            raw[key] = val
    if args.big:
        raw["big"] = True
    if getattr(args, "dump_samples", False):
        raw["dump_samples"] = True
    raw["out_dir"] = str(args.out)
    return ExperimentConfig(**raw)


def _write_rows(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def cmd_sweep(args) -> int:
    config = _build_config(args)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    if config.p_grid:
        records = run_sweep(config)
        write_sweep_csv(out / "sweep.csv", records)
        if config.dump_samples:
            from .sweeps import write_samples_npz

            write_samples_npz(out / "samples.npz", records)
    else:
        records = run_fixed_weight_sweep(config)
        write_micro_csv(out / "micro_sweep.csv", records)
    write_manifest(out / "manifest.json", config, time.time() - t0)
    return 0


def cmd_figure(args) -> int:
    config = _build_config(args)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    if args.family == "micro":
        _figure_micro(config, out)
    elif args.family == "canonical":
        _figure_canonical(config, out)
    else:
        _figure_postselect(config, out)
    write_manifest(out / f"manifest_{args.family}.json", config, time.time() - t0)
    return 0


def _figure_micro(config: ExperimentConfig, out: Path) -> None:
    if not config.w_grid:
        raise ConfigError("figure micro needs a w grid")
    n = max(config.n_list)
    for w in config.w_grid:
        centers, hist, overlay, _ = micro_band_histogram(
            n, config.k, config.q, w, config.samples, config.seed, config.budget_mb
        )
        rows = [( _fmt(x), _fmt(h), _fmt(m)) for x, h, m in zip(centers, hist, overlay)]
        _write_rows(out / f"micro_hist_N{n}_w{w}.csv", "x,density,mp", rows)
    records = run_fixed_weight_sweep(config)
    write_micro_csv(out / "micro_sweep.csv", records)


def _figure_canonical(config: ExperimentConfig, out: Path) -> None:
    if not config.p_grid:
        raise ConfigError("figure canonical needs a p grid")
    records = run_sweep(config)
    write_sweep_csv(out / "canonical_sweep.csv", records)
    n = max(config.n_list)
    rows = canonical_band_table(n, config.k, config.q, config.p_grid, config.samples, config.seed)
    _write_rows(
        out / f"canonical_bands_N{n}.csv",
        "p,w,mean_emp,p10,p90,mean_ansatz,is_reservoir",
        [
            (_fmt(r["p"]), str(r["w"]), _fmt(r["mean_emp"]), _fmt(r["p10"]),
             _fmt(r["p90"]), _fmt(r["mean_ansatz"]), str(int(r["is_reservoir"])))
            for r in rows
        ],
    )


def _figure_postselect(config: ExperimentConfig, out: Path) -> None:
    if not config.p_grid:
        raise ConfigError("figure postselect needs a p grid")
    k_over_n = config.k / max(config.n_list)
    _write_rows(
        out / "postselect_thresholds.csv", "alpha,p_c",
        [(_fmt(a), _fmt(ansatz.threshold_solve("renyi", k_over_n, config.q, alpha=a)))
         for a in DEFAULT_ALPHA_GRID],
    )
    p_hash = ansatz.threshold_solve("renyi", k_over_n, config.q, alpha=1)
    nu_grid = np.linspace(0.0, p_hash, 25)
    _write_rows(
        out / "postselect_boundary.csv", "w_over_N,p",
        [(_fmt(nu), _fmt(ansatz.threshold_solve("postselected", k_over_n, config.q, w_over_N=nu)))
         for nu in nu_grid],
    )
    alphas = [a for a in (config.alphas or [2.0]) if a > 1] or [2.0]
    cfg = ExperimentConfig(
        n_list=config.n_list, k=config.k, q=config.q, p_grid=config.p_grid,
        alphas=[1.0] + alphas, samples=config.samples, seed=config.seed,
        out_dir=config.out_dir, budget_mb=config.budget_mb, big=config.big,
    )
    records = run_sweep(cfg)
    alpha0 = max(alphas)
    p2 = ansatz.threshold_solve("renyi", k_over_n, config.q, alpha=alpha0)
    ent_rows, ic_rows = [], []
    for r in records:
        svn_pred = ansatz.reweighted_vn_leading(r.p, alpha0, r.N, r.k, r.q)
        base = [str(r.N), str(r.k), str(r.q), _fmt(r.p), _fmt(alpha0), str(r.samples)]
        ent_rows.append(base + [
            _fmt(r.mean("s2q")), _fmt(r.stderr("s2q")),
            _fmt(r.mean("svn_sigma")), _fmt(r.stderr("svn_sigma")),
            _fmt(r.s2q_ansatz), _fmt(svn_pred),
        ])
        ic_rows.append(base + [
            _fmt(r.mean("ic_post")), _fmt(r.stderr("ic_post")),
            _fmt((r.p - p2) * r.N),
        ])
    _write_rows(
        out / "postselect_entropy.csv",
        "N,k,q,p,alpha,samples,s2q_mean,s2q_stderr,svn_sigma_mean,svn_sigma_stderr,"
        "s2q_ansatz,svn_sigma_ansatz",
        ent_rows,
    )
    _write_rows(
        out / "postselect_ic.csv",
        "N,k,q,p,alpha,samples,ic_post_mean,ic_post_stderr,xprime_nu1",
        ic_rows,
    )


def cmd_ansatz(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = max(args.n or [9])
    k = args.k or 1
    q = args.q or 2
    alphas = args.alpha or [1.0, 2.0]
    p_grid = args.p_grid or [round(0.02 * i, 2) for i in range(1, 36)]
    pair = ansatz.enumerator_haar(n, k, q)
    rows = []
    for p in p_grid:
        for a in alphas:
            gamma = q * q * p / (q * q - 1)
            s2q = ansatz.renyi2_from_enumerators(pair, gamma)[0] if gamma <= 1 else float("nan")
            rows.append((
                _fmt(p), _fmt(a),
                _fmt(ansatz.coherent_info_leading(p, n, k, q)),
                _fmt(ansatz.renyi_entropy_leading(p, a, n, k, q, "Q")),
                _fmt(ansatz.renyi_entropy_leading(p, a, n, k, q, "RQ")),
                _fmt(s2q),
                _fmt(ansatz.reweighted_vn_leading(p, a, n, k, q)),
                _fmt(ansatz.threshold_solve("renyi", k / n, q, alpha=a)),
            ))
    _write_rows(
        out / "ansatz_curves.csv",
        "p,alpha,ic_leading,s_alpha_q,s_alpha_rq,s2q_haar,svn_reweighted,p_c_alpha",
        rows,
    )
    return 0


def _selftest_checks() -> list[tuple[str, bool]]:
    from . import CodeParams, encode, pauli_spectrum, rng_stream
    from .channels import convex_sum_oracle, depolarize, depolarize_dual
    from .ensemble import reduce_state
    from .spectra import spectrum

    checks = []
    psi = encode(CodeParams(N=4, k=1), rng_stream(12345, 0))
    dims = (2,) * 5
    rho = psi.rho_rq()
    noisy = depolarize(rho, 0.3, sites=range(1, 5), dims=dims)
    spec = spectrum(noisy)
    checks.append(("channel trace preserved", abs(spec.trace - 1) < 1e-12))
    checks.append(("channel output PSD", spec.values.min() >= -1e-9))
    oracle = convex_sum_oracle(rho, 0.3, sites=range(1, 5), dims=dims)
    checks.append(("sitewise = convex sum", np.abs(noisy - oracle).max() < 1e-10))
    dual = depolarize_dual(rho, 0.4, sites=range(1, 5), dims=dims)
    checks.append(("dual reparametrization", np.abs(dual - noisy).max() < 1e-12))
    ps = pauli_spectrum(psi.rho_q(), q=2)
    purity = float(np.real(np.vdot(psi.rho_q(), psi.rho_q())))
    checks.append(("phi sum rule", abs(ps.phi.sum() - 2**4 * purity) < 1e-10))
    spec_rq = pauli_spectrum(rho, q=2, logical_split=1)
    pair = ansatz.enumerator_from_phi(spec_rq.phi_identity, spec_rq.phi_total, 4, 1, 2)
    res1, res2 = ansatz.macwilliams_check(pair, np.array([0.0, 0.2, 1 / 3, 0.7, 1.0]))
    checks.append(("MacWilliams residual", float(np.abs(res1).max()) < 1e-9))
    model = ansatz.mean_shift_bands(0.12, 11, 1, 2, "Q")
    checks.append(("mean-shift trace", abs(model.total_mass() - 1) < 1e-10))
    rho_r = reduce_state(psi.amplitudes, dims, keep=(0,))
    checks.append(("reference maximally mixed", np.abs(rho_r - np.eye(2) / 2).max() < 1e-10))
    return checks


def cmd_selftest(args) -> int:
    checks = _selftest_checks()
    ok = True
    for name, passed in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}")
        ok &= passed
    if not ok:
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else 1
    base = dict(k=1, q=2, samples=6, seed=seed, out_dir=str(out), budget_mb=1024.0)
    micro = ExperimentConfig(n_list=[6], w_grid=[1, 2], **base)
    _figure_micro(micro, out)
    canonical = ExperimentConfig(n_list=[4, 5, 6], p_grid=[0.05, 0.12, 0.19, 0.26, 0.33], **base)
    _figure_canonical(canonical, out)
    postsel = ExperimentConfig(
        n_list=[4, 5, 6], p_grid=[0.2, 0.28, 0.36, 0.44], alphas=[1.0, 2.0], **base
    )
    _figure_postselect(postsel, out)
    print(f"selftest CSVs written to {out}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="haarcode", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="Monte Carlo sweep over a (N, p) or (N, w) grid")
    _add_common(sp)
    sp.set_defaults(func=cmd_sweep)

    fp = sub.add_parser("figure", help="emit figure-family data files")
    fp.add_argument("family", choices=("micro", "canonical", "postselect"))
    _add_common(fp)
    fp.set_defaults(func=cmd_figure)

    an = sub.add_parser("ansatz", help="closed-form curves only, no sampling")
    _add_common(an)
    an.set_defaults(func=cmd_ansatz)

    st = sub.add_parser("selftest", help="exact-identity checks plus small figure CSVs")
    st.add_argument("--out", type=Path, default=Path("selftest_out"))
    st.add_argument("--seed", type=int, default=None)
    st.set_defaults(func=cmd_selftest)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
