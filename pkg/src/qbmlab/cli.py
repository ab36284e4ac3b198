"""Command-line front end writing CSV data and JSON run metadata.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
Outputs go to ``--output`` or, when omitted, to ``$QBMLAB_OUTPUT_DIR``
(default: the working directory).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic, border, coefficients, nmwf
from .coefficients import CoefficientGrid, ReservoirSpec
from .errors import NumericalError, ValidationError

log = logging.getLogger("qbmlab")

OUTPUT_ENV = "QBMLAB_OUTPUT_DIR"


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------
def _add_reservoir(p, need_alpha=True):
    if need_alpha:
        p.add_argument("--alpha", type=float, required=True, help="coupling constant")
    p.add_argument("--r", type=float, required=True, help="cutoff ratio wc/w0")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float, help="temperature kT/w0")
    g.add_argument("--r0", type=float, help="reduced inverse temperature (see --convention)")
    g.add_argument("--rc-over-2pi", dest="rc", type=float,
                   help="rc = wc/(2 pi kT)")
    g.add_argument("--rc-times-2pi", dest="rc2pi", type=float,
                   help="2 pi rc = wc/kT")
    p.add_argument("--convention", choices=("appendix", "fig1"), default="appendix",
                   help="meaning of --r0: appendix w0/(2 pi kT), fig1 w0/kT")


def _add_grid(p, tmax=100.0, n=4000):
    p.add_argument("--tmax", type=float, default=tmax, help="final time in 1/w0")
    p.add_argument("--n", type=int, default=n, help="number of grid points")
    p.add_argument("--spacing", choices=("linear", "log", "graded"), default="linear")


def _add_output(p, default_name):
    p.add_argument("-o", "--output", default=None,
                   help=f"output CSV path (default: ${OUTPUT_ENV}/{default_name})")


def _resolve_spec(a):
    """ReservoirSpec from the parsed flags plus a record of the mapping used."""
    alpha = getattr(a, "alpha", 0.1)
    if a.theta is not None:
        spec = ReservoirSpec(alpha, a.r, a.theta)
        mapping = {"input": "theta", "value": a.theta}
    elif a.r0 is not None:
        spec = ReservoirSpec.from_r0(alpha, a.r, a.r0, a.convention)
        mapping = {"input": "r0", "value": a.r0, "convention": a.convention}
    elif a.rc is not None:
        spec = ReservoirSpec.from_rc(alpha, a.r, a.rc)
        mapping = {"input": "rc", "value": a.rc}
    else:
        if a.rc2pi <= 0:
            raise ValidationError("--rc-times-2pi must be > 0")
        spec = ReservoirSpec(alpha, a.r, a.r / a.rc2pi)
        mapping = {"input": "2pi_rc", "value": a.rc2pi}
    mapping.update(theta=spec.theta, r0=spec.r0, rc=spec.rc)
    return spec, mapping


def _spec_echo(spec):
    return {"alpha": spec.alpha, "r": spec.r, "theta": spec.theta}


def _output_path(a, default_name):
    if a.output:
        path = Path(a.output)
    else:
        path = Path(os.environ.get(OUTPUT_ENV, ".")) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_sidecar(csv_path, payload):
    side = Path(csv_path).with_suffix(".json")
    with open(side, "w") as fh:
        json.dump(payload, fh, indent=2, default=_json_default)
    return side


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(type(x))


def _parse_complex(text):
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise ValidationError(f"cannot parse complex value {text!r}; use re,im")


def parse_state(text):
    """ground | fock:N | coherent:re[,im] | squeezed:s | thermal:nbar."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "ground":
            return analytic.InitialStateMoments.ground()
        if kind == "fock":
            return analytic.InitialStateMoments.fock(int(arg))
        if kind == "coherent":
            return analytic.InitialStateMoments.coherent(_parse_complex(arg))
        if kind == "squeezed":
            return analytic.InitialStateMoments.squeezed(float(arg))
        if kind == "thermal":
            return analytic.InitialStateMoments.thermal(float(arg))
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad state argument {text!r}: {exc}") from None
    raise ValidationError(f"unknown state {text!r}")


def parse_mc_state(text):
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "ground":
            return nmwf.Fock(0)
        if kind == "fock":
            return nmwf.Fock(int(arg))
        if kind == "coherent":
            return nmwf.Coherent(_parse_complex(arg))
    except ValueError:
        raise ValidationError(f"bad state argument {text!r}") from None
    raise ValidationError(f"Monte Carlo supports ground, fock:N and coherent:re,im, got {text!r}")


def _time_grid(a):
    return coefficients.time_grid(a.tmax, a.n, a.spacing)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------
def cmd_coeffs(a):
    spec, mapping = _resolve_spec(a)
    grid = coefficients.build_grid(spec, _time_grid(a), diagnostics=a.diagnostics)
    path = _output_path(a, "coeffs.csv")
    grid.to_csv(path)
    _write_sidecar(path, {"command": "coeffs", "spec": _spec_echo(spec),
                          "temperature": mapping, "tmax": a.tmax, "n": a.n,
                          "spacing": a.spacing, "diagnostics": a.diagnostics})
    print(path)
    return 0


OBS_COLUMNS = {
    "n": ("n_mean",),
    "varx": ("var_x",),
    "q": ("mandel_q",),
    "wigner": ("wigner_center_re", "wigner_center_im", "wigner_width"),
}


def cmd_observables(a):
    spec, mapping = _resolve_spec(a)
    m = parse_state(a.state)
    t = _time_grid(a)
    grid = coefficients.build_grid(spec, t)
    table = analytic.observables_table(grid, m)
    obs = a.obs or ["all"]
    if "all" in obs:
        cols = list(analytic.OBSERVABLE_COLUMNS[1:])
    else:
        cols = [c for o in obs for c in OBS_COLUMNS[o]]
    header = ["t"] + cols
    data = [table["t"]] + [table[c] for c in cols]
    if a.free_reference:
        free = analytic.observables_table(CoefficientGrid.free(t), m)
        header += [c + "_free" for c in cols]
        data += [free[c] for c in cols]
    path = _output_path(a, "observables.csv")
    coefficients.write_csv(path, header, data)
    _write_sidecar(path, {"command": "observables", "spec": _spec_echo(spec),
                          "temperature": mapping, "state": a.state,
                          "moments": {"n0": m.n0, "q0": m.q0, "var_x0": m.var_x0,
                                      "var_p0": m.var_p0, "cov0": m.cov0,
                                      "center": m.center},
                          "obs": obs, "free_reference": a.free_reference,
                          "tmax": a.tmax, "n": a.n, "spacing": a.spacing})
    print(path)
    return 0


def cmd_mc(a):
    spec, mapping = _resolve_spec(a)
    initial = parse_mc_state(a.state)
    t_coef = coefficients.time_grid(a.tmax, a.grid_n)
    grid = coefficients.build_grid(spec, t_coef)
    samples = np.linspace(0.0, a.tmax, a.samples)
    cfg = nmwf.TrajectoryConfig(initial=initial, n_max=a.nmax, beta=a.beta,
                                t_grid=samples, seed=a.seed, n_traj=a.ntraj)
    est = nmwf.run_ensemble(cfg, grid, workers=a.workers)
    n0 = nmwf.init_state(initial, a.nmax).n_element().real
    n_an = analytic.heating_at(grid, n0, samples) if a.with_analytic else None
    path = _output_path(a, "mc.csv")
    est.to_csv(path, n_an)
    # wall time is the only nondeterministic field; keep it out of the CSV
    est.to_json(Path(path).with_suffix(".json"), cfg,
                {"command": "mc", "spec": _spec_echo(spec), "temperature": mapping,
                 "grid_n": a.grid_n, "workers": a.workers})
    print(path)
    return 0


def cmd_border(a):
    if a.action == "critical-r":
        r = border.critical_r_high_t(a.horizon, a.tol_r)
        print(f"{r:.6g}")
        if a.output:
            path = _output_path(a, "critical_r.csv")
            coefficients.write_csv(path, ("critical_r", "tol_r"), [[r], [a.tol_r]])
            _write_sidecar(path, {"command": "border critical-r", "tol_r": a.tol_r,
                                  "horizon": a.horizon, "critical_r": r})
        return 0
    if a.action == "classify":
        spec, mapping = _resolve_spec(a)
        verdict = border.classify(spec, a.horizon, a.n_points)
        print(verdict.value)
        if a.output:
            path = _output_path(a, "classify.json")
            with open(path, "w") as fh:
                json.dump({"command": "border classify", "spec": _spec_echo(spec),
                           "temperature": mapping, "verdict": verdict.value,
                           "horizon": a.horizon or border.default_horizon(spec.r)},
                          fh, indent=2)
        return 0
    if a.action == "profile":
        spec, mapping = _resolve_spec(a)
        prof = border.sign_profile(spec, a.horizon, a.n_points)
        path = _output_path(a, "profile.csv")
        rows = [(q, s, e) for q, p in prof.items() for s, e in p.negative_intervals]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("quantity", "t_start", "t_end"))
            for q, s, e in rows:
                w.writerow((q, f"{s:.17g}", f"{e:.17g}"))
        horizon = next(iter(prof.values())).horizon
        _write_sidecar(path, {"command": "border profile", "spec": _spec_echo(spec),
                              "temperature": mapping, "horizon": horizon,
                              "verdict": border.classify(spec, horizon, a.n_points).value})
        print(path)
        return 0
    # contour
    regime = "high_t" if a.regime in ("high_t", "high-t", "hight") else a.regime
    r_values = np.linspace(a.r_min, a.r_max, a.nr)
    wct = np.linspace(0.0, a.wct_max, a.nt)
    data = border.contour_grid(regime, r_values, wct, a.rc2pi, a.alpha)
    path = _output_path(a, f"contour_{regime}.csv")
    data.to_csv(path)
    rr, first = border.border_polyline(regime, r_values, a.wct_max, a.rc2pi, a.alpha,
                                       n_points=a.nt)
    poly = Path(path).with_name(Path(path).stem + "_border.csv")
    border.write_polyline_csv(poly, rr, first)
    _write_sidecar(path, {"command": "border contour", "regime": regime,
                          "rc_times_2pi": a.rc2pi, "alpha": a.alpha,
                          "r": [a.r_min, a.r_max, a.nr], "wct": [0.0, a.wct_max, a.nt],
                          "border_csv": str(poly)})
    print(path)
    return 0


def cmd_wigner(a):
    spec, mapping = _resolve_spec(a)
    alpha0 = _parse_complex(a.alpha0)
    t = _time_grid(a)
    grid = coefficients.build_grid(spec, t)
    path = _output_path(a, "wigner.csv")
    if a.times:
        times = [float(x) for x in a.times.split(",")]
        ext = a.extent
        axis = np.linspace(-ext, ext, a.npix)
        cols = {"t": [], "re": [], "im": [], "w": []}
        for ti in times:
            wf = analytic.wigner_coherent(grid, alpha0, ti)
            field = wf.field(axis, axis)
            re, im = np.meshgrid(axis, axis)
            cols["t"].append(np.full(field.size, ti))
            cols["re"].append(re.ravel())
            cols["im"].append(im.ravel())
            cols["w"].append(field.ravel())
        coefficients.write_csv(path, ("t", "re", "im", "w"),
                               [np.concatenate(cols[k]) for k in ("t", "re", "im", "w")])
    else:
        m = analytic.InitialStateMoments.coherent(alpha0)
        table = analytic.observables_table(grid, m)
        names = ("t", "wigner_center_re", "wigner_center_im", "wigner_width")
        coefficients.write_csv(path, names, [table[k] for k in names])
    _write_sidecar(path, {"command": "wigner", "spec": _spec_echo(spec),
                          "temperature": mapping, "alpha0": alpha0,
                          "times": a.times, "tmax": a.tmax, "n": a.n})
    print(path)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog="qbmlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="master-equation coefficients on a time grid")
    _add_reservoir(c)
    _add_grid(c)
    c.add_argument("--diagnostics", action="store_true",
                   help="also compute pi and rshift by quadrature")
    _add_output(c, "coeffs.csv")
    c.set_defaults(func=cmd_coeffs)

    o = sub.add_parser("observables", help="analytic observables")
    _add_reservoir(o)
    _add_grid(o)
    o.add_argument("--state", default="ground",
                   help="ground | fock:N | coherent:re,im | squeezed:s | thermal:nbar")
    o.add_argument("--obs", action="append", choices=("n", "varx", "q", "wigner", "all"))
    o.add_argument("--free-reference", action="store_true",
                   help="add the uncoupled-oscillator columns")
    _add_output(o, "observables.csv")
    o.set_defaults(func=cmd_observables)

    m = sub.add_parser("mc", help="Monte Carlo heating estimate")
    _add_reservoir(m)
    m.add_argument("--tmax", type=float, default=100.0)
    m.add_argument("--samples", type=int, default=51, help="output sample points")
    m.add_argument("--grid-n", type=int, default=8001,
                   help="points of the coefficient grid")
    m.add_argument("--state", default="ground")
    m.add_argument("--ntraj", type=int, default=10000)
    m.add_argument("--beta", type=float, default=1.0)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--nmax", type=int, default=30)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--with-analytic", action="store_true",
                   help="add the analytic heating column")
    _add_output(m, "mc.csv")
    m.set_defaults(func=cmd_mc)

    b = sub.add_parser("border", help="Lindblad / non-Lindblad border")
    bsub = b.add_subparsers(dest="action", required=True)
    bc = bsub.add_parser("classify")
    _add_reservoir(bc)
    bc.add_argument("--horizon", type=float, default=None)
    bc.add_argument("--n-points", type=int, default=4000)
    _add_output(bc, "classify.json")
    bp = bsub.add_parser("profile")
    _add_reservoir(bp)
    bp.add_argument("--horizon", type=float, default=None)
    bp.add_argument("--n-points", type=int, default=4000)
    _add_output(bp, "profile.csv")
    bk = bsub.add_parser("critical-r")
    bk.add_argument("--horizon", type=float, default=None)
    bk.add_argument("--tol-r", type=float, default=1e-3)
    _add_output(bk, "critical_r.csv")
    bt = bsub.add_parser("contour")
    bt.add_argument("--regime", choices=("high_t", "high-t", "general"), default="high_t")
    bt.add_argument("--rc-times-2pi", dest="rc2pi", type=float, default=10.0)
    bt.add_argument("--alpha", type=float, default=0.1)
    bt.add_argument("--r-min", type=float, default=0.05)
    bt.add_argument("--r-max", type=float, default=2.0)
    bt.add_argument("--nr", type=int, default=40)
    bt.add_argument("--wct-max", type=float, default=10.0)
    bt.add_argument("--nt", type=int, default=400)
    _add_output(bt, "contour.csv")
    b.set_defaults(func=cmd_border)

    w = sub.add_parser("wigner", help="Wigner function of an initially coherent state")
    _add_reservoir(w)
    _add_grid(w)
    w.add_argument("--alpha0", default="1,0", help="initial amplitude re,im")
    w.add_argument("--times", default=None,
                   help="comma-separated snapshot times; omit for the center/width series")
    w.add_argument("--extent", type=float, default=3.0)
    w.add_argument("--npix", type=int, default=61)
    _add_output(w, "wigner.csv")
    w.set_defaults(func=cmd_wigner)
    return p


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
