"""Command line entry point ``lpvar``.

Every subcommand reads a :class:`RunConfig` built from defaults, then an
optional JSON file (``--config``), then explicit flags.  Monte Carlo cells
draw from ``RngStream(seed, stream_id_for(subcommand, p, n, k))``: child 0
supplies a Haar direction and child 1 the samples, so any single row can be
reproduced in isolation.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys

import numpy as np

from . import orlicz, permavg, projest, specfun, steiner, svgplot, validate, weights
from .batching import mean_estimate, run_batches
from .config import RunConfig, in_window
from .rand_core import RngStream, sample_gg, sample_gs, stream_id_for
from .weights import Direction

RATIO_HEADER = ["p", "n", "theta_mode", "theta_seed", "N", "e_norm2", "e_norm2_se", "var_norm2",
                "var_norm2_se", "lambda2", "ratio", "ratio_se", "ratio_over_log1p", "scale_n_pow",
                "term1", "term2", "term3", "term4"]
MOMENTS_HEADER = ["quantity", "p", "n", "alpha", "N", "empirical", "empirical_se", "oracle", "z"]
ORLICZ_HEADER = ["p", "n", "theta_mode", "theta_seed", "N", "norm_M", "certificate", "e_psi",
                 "e_psi_se", "e_phi", "e_phi_se", "ratio", "ratio_se", "sqrt_p_epsi", "in_window"]
STEINER_HEADER = ["p", "n", "theta_mode", "theta_seed", "N", "var_x", "var_x_se", "var_y",
                  "var_y_se", "diff", "diff_se", "bound", "theta4_gap", "theta4_gap_se",
                  "ratio_x", "ratio_y", "in_window"]
PERMAVG_HEADER = ["n", "q", "case", "brute", "rearrangement", "ratio", "in_window"]
NAN = float("nan")


class CliError(Exception):
    pass


# -- configuration ---------------------------------------------------------------

def _float_list(s):
    return [float(v) for v in s.split(",") if v.strip()]


def _int_list(s):
    return [int(v) for v in s.split(",") if v.strip()]


def build_config(args) -> RunConfig:
    """Defaults, then ``--config``, then flags."""
    cfg = RunConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = RunConfig.from_json(fh.read())
        except OSError as exc:
            raise CliError(f"cannot read config {args.config}: {exc.strerror}") from exc
    for name in ("p", "n", "theta", "samples", "seed", "threads", "out", "format"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg.validate()


def _file_directions(path, n):
    try:
        data = np.loadtxt(path, ndmin=2)
    except OSError as exc:
        raise CliError(f"cannot read direction file {path}: {exc}") from exc
    rows = [r for r in data if r.size == n]
    if not rows:
        raise CliError(f"{path}: no direction of length {n}")
    return [Direction.of(r) for r in rows]


def directions(cfg: RunConfig, sub: str, p: float, n: int):
    """``(mode, theta_seed, Direction, stream)`` for each direction of a cell."""
    out = []
    if cfg.theta == "haar":
        for k in range(cfg.n_theta):
            sid = stream_id_for(sub, p, n, k)
            st = RngStream(cfg.seed, sid)
            out.append(("haar", sid, Direction.haar(st.child(0), n), st.child(1)))
        return out
    if cfg.theta == "diag":
        dirs = [Direction.diag(n)]
    elif cfg.theta == "axis":
        dirs = [Direction.axis(n, n - 1)]
    else:
        dirs = _file_directions(cfg.theta[len("file:"):], n)
    for k, d in enumerate(dirs):
        sid = stream_id_for(sub, p, n, k)
        out.append((cfg.theta.split(":")[0], sid, d, RngStream(cfg.seed, sid).child(1)))
    return out


# -- subcommands -----------------------------------------------------------------

def cmd_moments(cfg: RunConfig):
    rows = []
    alphas = (1.0, 2.0, 4.0)
    for p in cfg.p:
        st = RngStream(cfg.seed, stream_id_for("moments", p, 1, 0))
        z, bs = run_batches(st, cfg.samples,
                            lambda s, b, p=p: [np.mean(np.abs(sample_gg(s, p, b)) ** a) for a in alphas],
                            workers=cfg.threads)
        for j, a in enumerate(alphas):
            est = mean_estimate(z[:, j], bs)
            oracle = specfun.moment_g(p, a)
            rows.append(["g", p, 1, a, cfg.samples, est.mean, est.stderr, oracle, est.zscore(oracle)])
        for n in cfg.n:
            st = RngStream(cfg.seed, stream_id_for("moments", p, n, 0))
            z, bs = run_batches(st, cfg.samples,
                                lambda s, b, p=p, n=n: [np.mean(sample_gs(s, p, n, b).s ** a) for a in alphas],
                                workers=cfg.threads)
            for j, a in enumerate(alphas):
                est = mean_estimate(z[:, j], bs)
                oracle = specfun.moment_S(p, n, a)
                rows.append(["S", p, n, a, cfg.samples, est.mean, est.stderr, oracle, est.zscore(oracle)])
    return MOMENTS_HEADER, rows


def cmd_ratio(cfg: RunConfig):
    rows = []
    for p in cfg.p:
        for n in cfg.n:
            for mode, sid, d, st in directions(cfg, "ratio", p, n):
                spec = projest.ProjectedBodySpec(p, n, d)
                head = [p, n, mode, sid, cfg.samples]
                try:
                    r = projest.variance_report(spec, max(cfg.samples, 100_000), st, cfg.threads)
                except projest.DegenerateWeight:
                    rows.append(head + [NAN] * 8 + [projest.theoretical_scale(spec)] + [NAN] * 4)
                    continue
                rows.append(head + [r.e_norm2.mean, r.e_norm2.stderr, r.var_norm2.mean,
                                    r.var_norm2.stderr, r.lambda2, r.ratio.mean, r.ratio.stderr,
                                    r.ratio_over_log1p, r.scale] + [t.mean for t in r.terms])
    return RATIO_HEADER, rows


def cmd_orlicz(cfg: RunConfig):
    rows = []
    w = cfg.windows
    for p in cfg.p:
        m = None
        with contextlib.suppress(orlicz.UnsupportedExponent):
            m = orlicz.orlicz_for(p)
        for n in cfg.n:
            for mode, sid, d, st in directions(cfg, "orlicz", p, n):
                epsi, ephi, _ = weights.estimate_psi_phi(p, n, d, cfg.samples, st, cfg.threads)
                if m is None:
                    rho = cert = ratio = ratio_se = NAN
                else:
                    rho = orlicz.luxemburg_norm(m, d.theta)
                    cert = orlicz.luxemburg_certificate(m, d.theta, rho)
                    ratio, ratio_se = ephi.mean / rho, ephi.stderr / rho
                ok = in_window(ratio, w.orlicz) if m is not None else ""
                rows.append([p, n, mode, sid, cfg.samples, rho, cert, epsi.mean, epsi.stderr,
                             ephi.mean, ephi.stderr, ratio, ratio_se, math.sqrt(p) * epsi.mean, ok])
    return ORLICZ_HEADER, rows


def cmd_steiner(cfg: RunConfig):
    rows = []
    w = cfg.windows
    for p in cfg.p:
        for n in cfg.n:
            for mode, sid, d, st in directions(cfg, "steiner", p, n):
                r = steiner.steiner_variance_compare(p, n, d, cfg.samples, st, cfg.threads)
                diff = r["diff"]
                ok = abs(diff.mean) <= w.steiner_const * r["bound"] + w.sigma_k * diff.stderr
                rows.append([p, n, mode, sid, cfg.samples, r["var_x"].mean, r["var_x"].stderr,
                             r["var_y"].mean, r["var_y"].stderr, diff.mean, diff.stderr, r["bound"],
                             r["e_theta4_gap"].mean, r["e_theta4_gap"].stderr, r["ratio_x"].mean,
                             r["ratio_y"].mean, ok])
    return STEINER_HEADER, rows


def cmd_permavg(cfg: RunConfig):
    rows = []
    w = cfg.windows
    for n in cfg.n:
        if n > permavg.MAX_BRUTE_N:
            raise CliError(f"permavg enumerates n! permutations; n must be <= {permavg.MAX_BRUTE_N}, got {n}")
        ones = permavg.RearrangementInput(np.ones((n, n)))
        b, r = permavg.brute_avg_permutations(ones), permavg.rearrangement_functional(ones)
        rows.append([n, 2.0, "ones", b, r, b / r, in_window(b / r, w.permavg)])
        st = RngStream(cfg.seed, stream_id_for("permavg", 2.0, n, 0))
        for k, a in enumerate(permavg.random_matrix_cases(st, n, cfg.n_theta)):
            inp = permavg.RearrangementInput(a)
            b, r = permavg.brute_avg_permutations(inp), permavg.rearrangement_functional(inp)
            rows.append([n, 2.0, k, b, r, b / r, in_window(b / r, w.permavg)])
    return PERMAVG_HEADER, rows


COMMANDS = {
    "moments": cmd_moments,
    "ratio": cmd_ratio,
    "orlicz": cmd_orlicz,
    "steiner": cmd_steiner,
    "permavg": cmd_permavg,
}


# -- output ----------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def format_json(header, rows) -> str:
    recs = [{h: _json_value(v) for h, v in zip(header, r)} for r in rows]
    return json.dumps(recs, indent=2) + "\n"


def emit(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}") from exc


# -- argument parsing ------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file (flags take precedence)")
    p.add_argument("--p", type=_float_list, help="comma-separated exponents, e.g. 1,2,4")
    p.add_argument("--n", type=_int_list, help="comma-separated dimensions")
    p.add_argument("--theta", help="haar | diag | axis | file:PATH")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per cell")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpvar", description="Projections of l_p balls: "
                                 "Monte Carlo, quadrature and window checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("moments", "sampler moments against closed forms"),
                           ("ratio", "variance ratio reports per (p, n, theta)"),
                           ("orlicz", "E phi against the Luxemburg norm"),
                           ("steiner", "Steiner symmetrization variance comparison"),
                           ("permavg", "permutation averages against the rearrangement formula")):
        _common(sub.add_parser(name, help=helptext))
    v = sub.add_parser("validate", help="run the acceptance battery")
    _common(v)
    v.add_argument("--suite", choices=("quick", "full"), default="quick")
    v.add_argument("--timings", action="store_true", help="include wall times in the report")
    pl = sub.add_parser("plot", help="render an SVG from a CSV")
    pl.add_argument("csv")
    pl.add_argument("--kind", choices=sorted(svgplot.KINDS), required=True)
    pl.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            svgplot.plot_csv(args.csv, args.kind, args.out)
            return 0
        cfg = build_config(args)
        if args.command == "validate":
            def progress(res, secs):
                print(f"[{res['status']:>4}] {res['id']:2d} {res['name']} ({secs:.1f}s)", file=sys.stderr)
            report = validate.run_suite(args.suite, cfg.seed, cfg.windows, cfg.threads,
                                        args.timings, progress)
            emit(validate.report_json(report), cfg.out)
            return 0 if report["passed"] else 1
        header, rows = COMMANDS[args.command](cfg)
        text = format_csv(header, rows) if cfg.format == "csv" else format_json(header, rows)
        emit(text, cfg.out)
        return 0
    except (CliError, svgplot.SchemaError, ValueError, OSError) as exc:
        print(f"lpvar: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
