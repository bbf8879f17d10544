"""The acceptance battery behind ``lpvar validate``.

Every criterion is a function ``(ctx) -> (passed, measured)``.  Windows come
from ``ctx.windows``; library functions are looked up through their modules
at call time so that a monkeypatched ``specfun.moment_g`` is seen by every
check that depends on it.  Reports are deterministic for a fixed seed: wall
times are left out unless explicitly requested, and runtime budgets only
enter through the pass flag.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import batching, oracle_quad, orlicz, permavg, projest, rand_core, specfun, steiner, weights
from .config import Windows, in_window
from .rand_core import RngStream, stream_id_for
from .weights import Direction

CRITERIA_IDS = tuple(range(1, 16))
SUITES = {
    "quick": {1: False, 2: False, 3: False, 7: True, 9: True},
    "full": {i: False for i in CRITERIA_IDS},
}
QUICK_BUDGET = 120.0
SUITE_BUDGET = {"quick": QUICK_BUDGET, "full": 1800.0}


@dataclass
class Context:
    seed: int = 20160101
    windows: Windows = field(default_factory=Windows)
    workers: int = 1
    partial: bool = False

    def stream(self, cid, *key):
        return RngStream(self.seed, stream_id_for("validate", cid, *key))


def _f(x):
    """JSON-safe float with a stable textual form."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


# -- 1 ---------------------------------------------------------------------------

def crit_moments(ctx):
    k = ctx.windows.sigma_k
    t0 = time.perf_counter()
    rows, ok = [], True
    alphas = (1.0, 2.0, 4.0)
    for p in (1.0, 1.5, 2.0, 3.0, 8.0):
        def g_batch(s, bs, p=p):
            a = np.abs(rand_core.sample_gg(s, p, bs))
            return [np.mean(a ** al) for al in alphas]
        z, bs = batching.run_batches(ctx.stream(1, "g", p), 1_000_000, g_batch, workers=ctx.workers)
        for j, al in enumerate(alphas):
            est = batching.mean_estimate(z[:, j], bs)
            zs = est.zscore(specfun.moment_g(p, al))
            ok &= abs(zs) <= k
            rows.append({"var": "g", "p": p, "alpha": al, "mean": _f(est.mean), "z": _f(zs)})
        for n in (8, 64):
            def s_batch(s, bs, p=p, n=n):
                sv = rand_core.sample_gs(s, p, n, bs).s
                return [np.mean(sv ** al) for al in alphas]
            z, bs = batching.run_batches(ctx.stream(1, "S", p, n), 1_000_000, s_batch,
                                         workers=ctx.workers)
            for j, al in enumerate(alphas):
                est = batching.mean_estimate(z[:, j], bs)
                zs = est.zscore(specfun.moment_S(p, n, al))
                ok &= abs(zs) <= k
                rows.append({"var": "S", "p": p, "n": n, "alpha": al, "mean": _f(est.mean), "z": _f(zs)})
    in_budget = time.perf_counter() - t0 < 60.0
    return bool(ok and in_budget), {"rows": rows, "within_60s": in_budget}


# -- 2 ---------------------------------------------------------------------------

def crit_independence(ctx):
    N = 1_000_000
    rows, ok = [], True
    for p in (1.5, 3.0):
        def batch(s, bs, p=p):
            gs = rand_core.sample_gs(s, p, 16, bs)
            a = np.abs(gs.g).max(axis=1) / gs.s
            b = gs.s
            return [a.mean(), b.mean(), (a * b).mean(), (a * a).mean(), (b * b).mean()]
        z, _ = batching.run_batches(ctx.stream(2, p), N, batch, workers=ctx.workers)
        ma, mb, mab, maa, mbb = z.mean(axis=0)
        r = (mab - ma * mb) / math.sqrt((maa - ma * ma) * (mbb - mb * mb))
        ok &= abs(r) <= ctx.windows.sigma_k / math.sqrt(N)
        rows.append({"p": p, "n": 16, "pearson_r": _f(r)})
    return bool(ok), {"rows": rows, "limit": _f(ctx.windows.sigma_k / math.sqrt(N))}


# -- 3 ---------------------------------------------------------------------------

def _euclid_targets(n):
    m = n - 1
    e2 = m / (m + 2)
    e4 = m / (m + 4)
    var = e4 - e2 * e2
    lam = 1.0 / (m + 2)
    return e2, var, lam, var / (lam * e2)


def crit_disk(ctx):
    k = ctx.windows.sigma_k
    out = {}
    ok = True
    for n, checks in ((3, ("e", "var", "lam", "ratio")), (9, ("e", "lam"))):
        spec = projest.ProjectedBodySpec(2.0, n, Direction.axis(n, n - 1))
        rep = projest.variance_report(spec, 1_000_000, ctx.stream(3, n), ctx.workers)
        e2, var, lam, ratio = _euclid_targets(n)
        z = {
            "e": rep.e_norm2.zscore(e2),
            "var": rep.var_norm2.zscore(var),
            "lam": (rep.lambda2 - lam) / rep.lambda2_se,
            "ratio": rep.ratio.zscore(ratio),
        }
        for c in checks:
            ok &= abs(z[c]) <= k
        out[f"n{n}"] = {"e_norm2": _f(rep.e_norm2.mean), "var_norm2": _f(rep.var_norm2.mean),
                        "lambda2": _f(rep.lambda2), "ratio": _f(rep.ratio.mean),
                        "z": {c: _f(z[c]) for c in checks}}
    return bool(ok), out


# -- 4 ---------------------------------------------------------------------------

def crit_quad(ctx):
    t0 = time.perf_counter()
    rows, ok = [], True
    for p in (1.5, 3.0):
        d = Direction.haar(ctx.stream(4, "theta", p), 3)
        spec = projest.ProjectedBodySpec(p, 3, d)
        norm2 = lambda x: (x * x).sum(axis=1)
        oracle = oracle_quad.quad_moments_projection(p, 3, d, norm2)
        est = projest.estimate_ef(spec, norm2, 2_000_000, ctx.stream(4, "mc", p), ctx.workers)
        tol = max(ctx.windows.sigma_k * est.stderr, 0.01 * abs(oracle.value))
        ok &= abs(est.mean - oracle.value) <= tol
        rows.append({"p": p, "oracle": _f(oracle.value), "oracle_delta": _f(oracle.delta),
                     "mc": _f(est.mean), "mc_se": _f(est.stderr)})
    in_budget = time.perf_counter() - t0 < 180.0
    return bool(ok and in_budget), {"rows": rows, "within_3min": in_budget}


# -- 5, 6 ------------------------------------------------------------------------

SWEEP_N = (8, 16, 32, 64)
SWEEP_P = (1.0, 2.0, 4.0, 16.0, 64.0)


def _haar(ctx, cid, p, n, k):
    return Direction.haar(ctx.stream(cid, "theta", p, n, k), n)


def _ratio(ctx, cid, p, n, d, N, k):
    spec = projest.ProjectedBodySpec(p, n, d)
    return projest.variance_report(spec, N, ctx.stream(cid, "mc", p, n, k), ctx.workers)


def crit_sweep(ctx):
    w = ctx.windows
    t0 = time.perf_counter()
    worst_r, worst_l, rows = 0.0, 0.0, []
    for n in SWEEP_N:
        for p in SWEEP_P:
            for k in range(3):
                rep = _ratio(ctx, 5, p, n, _haar(ctx, 5, p, n, k), 100_000, k)
                worst_r = max(worst_r, rep.ratio.mean)
                worst_l = max(worst_l, rep.ratio_over_log1p)
                rows.append({"p": p, "n": n, "k": k, "ratio": _f(rep.ratio.mean)})
    big_p = []
    for n in (4, 8):
        p = float(n ** 3)
        rep = _ratio(ctx, 5, p, n, _haar(ctx, 5, p, n, 0), 100_000, 0)
        big_p.append({"p": p, "n": n, "ratio": _f(rep.ratio.mean)})
        worst_r = max(worst_r, rep.ratio.mean)
    in_budget = time.perf_counter() - t0 < 600.0
    ok = worst_r <= w.ratio_max and worst_l <= w.ratio_max and in_budget
    return bool(ok), {"max_ratio": _f(worst_r), "max_ratio_over_log1p": _f(worst_l),
                      "rows": rows, "p_gt_n": big_p, "within_10min": in_budget}


def crit_haar_fraction(ctx):
    w = ctx.windows
    ratios = []
    for k in range(50):
        rep = _ratio(ctx, 6, 16.0, 32, _haar(ctx, 6, 16.0, 32, k), 100_000, k)
        ratios.append(rep.ratio.mean)
    frac = float(np.mean(np.array(ratios) <= w.ratio_max))
    return frac >= w.haar_fraction_min, {"fraction": _f(frac), "max_ratio": _f(max(ratios))}


# -- 7, 8 ------------------------------------------------------------------------

def crit_epsi(ctx):
    w = ctx.windows
    ns = (16,) if ctx.partial else SWEEP_N
    ps = (1.0, 2.0, 4.0, 16.0) if ctx.partial else SWEEP_P
    N = 100_000
    rows, ok = [], True
    for n in ns:
        for p in ps:
            if p > n:
                continue
            if not ctx.partial:
                for k in range(3):
                    est = weights.estimate_epsi(p, n, _haar(ctx, 7, p, n, k), 1, N,
                                                ctx.stream(7, "haar", p, n, k), ctx.workers)
                    lower, upper = p * est.mean, math.sqrt(p) * est.mean
                    ok &= lower >= w.epsi[0] and upper <= w.epsi[1]
                    rows.append({"p": p, "n": n, "k": k, "p_epsi": _f(lower), "sqrt_p_epsi": _f(upper)})
            chk = weights.epsi_scaling_check(p, n, N, ctx.stream(7, "diag", p, n), ctx.workers)
            ok &= in_window(chk["normalized"], w.epsi)
            rows.append({"p": p, "n": n, "theta": "diag", "normalized": _f(chk["normalized"])})
    for n in ((4,) if ctx.partial else (4, 8, 16)):
        p = float(n * n)
        chk = weights.epsi_scaling_check(p, n, N, ctx.stream(7, "diag", p, n), ctx.workers)
        ok &= chk["regime"] == "p>n" and in_window(chk["normalized"], w.epsi)
        rows.append({"p": p, "n": n, "theta": "diag", "normalized": _f(chk["normalized"])})
    return bool(ok), {"rows": rows, "partial": ctx.partial}


def crit_remark(ctx):
    w = ctx.windows
    n, p = 4, 800.0
    dirs = {"diag": Direction.diag(n), "e1": Direction.axis(n, 0), "haar": _haar(ctx, 8, p, n, 0)}
    rows, ok = [], True
    for name, d in dirs.items():
        est = weights.remark_ratio(p, d, 2_000_000, ctx.stream(8, name), ctx.workers)
        ok &= in_window(est.mean, w.remark, w.sigma_k * est.stderr)
        rows.append({"theta": name, "value": _f(est.mean), "se": _f(est.stderr)})
    return bool(ok), {"rows": rows}


# -- 9 ---------------------------------------------------------------------------

def crit_orlicz(ctx):
    w = ctx.windows
    ns = (16,) if ctx.partial else (16, 64)
    n_dirs = 2 if ctx.partial else 5
    rows, ok, worst_cert = [], True, 0.0
    for p in (1.5, 2.0, 4.0):
        m = orlicz.orlicz_for(p)
        for n in ns:
            for k in range(n_dirs):
                d = _haar(ctx, 9, p, n, k)
                rho = orlicz.luxemburg_norm(m, d.theta)
                cert = orlicz.luxemburg_certificate(m, d.theta, rho)
                worst_cert = max(worst_cert, abs(cert - 1.0))
                _, ephi, _ = weights.estimate_psi_phi(p, n, d, 100_000, ctx.stream(9, p, n, k),
                                                      ctx.workers)
                ratio = ephi.mean / rho
                ok &= in_window(ratio, w.orlicz)
                rows.append({"p": p, "n": n, "k": k, "norm_M": _f(rho), "ratio": _f(ratio)})
    ok &= worst_cert <= 1e-6
    return bool(ok), {"rows": rows, "max_certificate_error": _f(worst_cert), "partial": ctx.partial}


# -- 10, 11, 12 ------------------------------------------------------------------

def crit_permavg(ctx):
    w = ctx.windows
    rows, ok = [], True
    for n in (4, 5, 6, 7):
        res = permavg.ratio_window_check(20, n, 2.0, ctx.stream(10, n))
        ok &= in_window(res["min"], w.permavg) and in_window(res["max"], w.permavg)
        ones = permavg.RearrangementInput(np.ones((n, n)), 2.0)
        b = permavg.brute_avg_permutations(ones)
        r = permavg.rearrangement_functional(ones)
        exact = abs(b - math.sqrt(n)) <= 1e-12 and abs(r - (1.0 + math.sqrt(n - 1))) <= 1e-12
        ok &= exact
        rows.append({"n": n, "min": _f(res["min"]), "max": _f(res["max"]), "all_ones_exact": exact})
    return bool(ok), {"rows": rows}


def crit_subset(ctx):
    k = ctx.windows.sigma_k
    n = 16
    rows, ok = [], True
    for p in (1.5, 4.0):
        for c in range(20):
            s = ctx.stream(11, p, c)
            d = Direction.haar(s.child(0), n)
            mask = s.child(1).generator.random(n) < 0.5
            idx = np.flatnonzero(mask)
            est = weights.subset_psi_ratio(p, n, d, idx, 100_000, s.child(2), ctx.workers)
            ok &= est.mean <= 1.0 + k * est.stderr
            rows.append({"p": p, "case": c, "size": int(idx.size), "ratio": _f(est.mean)})
    return bool(ok), {"max_ratio": _f(max(r["ratio"] for r in rows)), "rows": rows}


def crit_symsum(ctx):
    w = ctx.windows
    n = 32
    rows, ok = [], True
    for p in (1.5, 2.0, 4.0):
        est = weights.symmetric_sum_moment(p, n, 2, 1_000_000, ctx.stream(12, p, 2),
                                           root=False, workers=ctx.workers)
        target = 2.0 * n * (specfun.moment_g(p, 4) - specfun.moment_g(p, 2) ** 2)
        zs = est.zscore(target)
        ok &= abs(zs) <= w.sigma_k
        a4 = weights.symmetric_sum_moment(p, n, 4, 1_000_000, ctx.stream(12, p, 4),
                                          workers=ctx.workers)
        ok &= a4.mean <= w.sym_sum_const * math.sqrt(4 * n)
        rows.append({"p": p, "second": _f(est.mean), "closed_form": _f(target), "z": _f(zs),
                     "alpha4_over_sqrt_alpha_n": _f(a4.mean / math.sqrt(4 * n))})
    return bool(ok), {"rows": rows}


# -- 13, 14 ----------------------------------------------------------------------

def crit_decomposition(ctx):
    rows, ok = [], True
    for k in range(10):
        d = _haar(ctx, 13, 3.0, 8, k)
        res = steiner.projection_decomposition_check(3.0, 8, d, 1_000_000, ctx.stream(13, k),
                                                     ctx.workers, ctx.windows.sigma_k)
        ok &= res["passed"]
        rows.append({"k": k, "margin": _f(res["margin"].mean), "margin_se": _f(res["margin"].stderr)})
    return bool(ok), {"rows": rows}


def crit_steiner(ctx):
    w = ctx.windows
    k_sig = w.sigma_k
    n, p, N = 3, 1.5, 1_000_000
    rows, ok = [], True
    for k in range(10):
        res = steiner.steiner_variance_compare(p, n, _haar(ctx, 14, p, n, k), N,
                                               ctx.stream(14, k), ctx.workers)
        diff, gap = res["diff"], res["e_theta4_gap"]
        ok &= abs(diff.mean) <= w.steiner_const * res["bound"] + k_sig * diff.stderr
        ok &= gap.mean >= -k_sig * gap.stderr
        rows.append({"k": k, "diff": _f(diff.mean), "diff_se": _f(diff.stderr),
                     "theta4_gap": _f(gap.mean)})
    same = steiner.steiner_variance_compare(p, n, Direction.axis(n, n - 1), N,
                                            ctx.stream(14, "axis"), ctx.workers)["diff"]
    ok &= abs(same.mean) <= k_sig * same.stderr
    return bool(ok), {"rows": rows, "axis_diff": _f(same.mean), "axis_diff_se": _f(same.stderr)}


# -- 15 --------------------------------------------------------------------------

def crit_determinism(ctx):
    t0 = time.perf_counter()
    a = report_json(run_suite("quick", ctx.seed, ctx.windows, ctx.workers))
    elapsed = time.perf_counter() - t0
    b = report_json(run_suite("quick", ctx.seed, ctx.windows, ctx.workers))
    same = a == b
    quick_ok = json.loads(a)["passed"]
    in_budget = elapsed <= QUICK_BUDGET
    return bool(same and in_budget), {"identical": same, "quick_within_2min": in_budget,
                                      "quick_passed": quick_ok}


CRITERIA = {
    1: ("moment oracle", crit_moments),
    2: ("independence of G/S and S", crit_independence),
    3: ("euclidean closed forms", crit_disk),
    4: ("quadrature oracle equivalence", crit_quad),
    5: ("ratio boundedness sweep", crit_sweep),
    6: ("haar-typical directions", crit_haar_fraction),
    7: ("E psi scaling", crit_epsi),
    8: ("large-p limit of E psi", crit_remark),
    9: ("orlicz equivalence", crit_orlicz),
    10: ("permutation average", crit_permavg),
    11: ("subset bound", crit_subset),
    12: ("symmetric sum moments", crit_symsum),
    13: ("projection decomposition", crit_decomposition),
    14: ("steiner comparison", crit_steiner),
    15: ("determinism", crit_determinism),
}


def run_criterion(cid: int, ctx: Context) -> dict:
    name, fn = CRITERIA[cid]
    t0 = time.perf_counter()
    try:
        passed, measured = fn(ctx)
        error = None
    except Exception as exc:  # a crash is a failure, recorded with its message
        passed, measured, error = False, {}, f"{type(exc).__name__}: {exc}"
    out = {"id": cid, "name": name, "status": "pass" if passed else "fail",
           "partial": ctx.partial, "measured": measured}
    if error:
        out["error"] = error
    out["_seconds"] = time.perf_counter() - t0
    return out


def run_suite(suite: str, seed: int = 20160101, windows: Windows | None = None,
              workers: int = 1, timings: bool = False, progress=None) -> dict:
    """Run ``quick`` or ``full``; criteria outside the suite are listed as skipped."""
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {sorted(SUITES)}")
    windows = windows or Windows()
    t0 = time.perf_counter()
    results = []
    for cid in CRITERIA_IDS:
        if cid not in SUITES[suite]:
            results.append({"id": cid, "name": CRITERIA[cid][0], "status": "skipped"})
            continue
        ctx = Context(seed, windows, workers, SUITES[suite][cid])
        res = run_criterion(cid, ctx)
        secs = res.pop("_seconds")
        if timings:
            res["seconds"] = round(secs, 3)
        if progress:
            progress(res, secs)
        results.append(res)
    in_budget = time.perf_counter() - t0 <= SUITE_BUDGET[suite]
    passed = in_budget and all(r["status"] != "fail" for r in results)
    return {"suite": suite, "seed": seed, "windows": windows.to_dict(), "passed": passed,
            "within_budget": in_budget, "criteria": results}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
