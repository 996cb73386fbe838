"""Experiment runner: figure data as CSV, the invariant suite, and one-off evaluations.

Subcommands
-----------
fig1   CHSH maximum, entanglement, and the violation quantifier on a tau grid.
fig2   Entanglement vs. classical inseparability and both CHSH maxima, for a
       list of shape parameters.
check  Run every registered invariant; exit 0 only if all pass.
eval   Print a single named scalar at full precision.

Output is plain CSV (UTF-8, '.' decimal, one-line header); every run echoes
its fully resolved configuration as '#'-prefixed comment lines, so two runs
with the same configuration and seed produce byte-identical files.
Exit codes: 0 success, 1 invariant/optimizer/convergence failure, 2 usage.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import chsh, classical, quantum, reference
from .checks import run_all_checks
from .classical import DistributionSpec, QuadratureSpec
from .chsh import DegenerateNormalizationError
from .classical import QuadratureConvergenceError
from .spinspace import CoherentLabel, PhasePoint, phase_point_from_w, w_from_phase_point

GATE_TOL = 1e-8
SPOT_STRIDE_QUANTUM = 25    # optimizer cross-check cadence on quantum rows
SPOT_STRIDE_CLASSICAL = 100
SPOT_TOL = 1e-6

EVAL_QUANTITIES = (
    "cq", "ccl", "bmax_q", "bmax_cl", "gamma_q", "gamma_cl",
    "u_q", "v_q", "u_cl", "v_cl", "ccl_limit", "omega_q", "omega_cl",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_w0(text: str) -> CoherentLabel:
    """Parse a coherent-state label: "re,im", polar "q0:p0", or a bare real."""
    text = text.strip()
    try:
        if ":" in text:
            q0, p0 = (float(part) for part in text.split(":"))
            return w_from_phase_point(PhasePoint(q0, p0))
        if "," in text:
            re, im = (float(part) for part in text.split(","))
            return CoherentLabel(complex(re, im))
        return CoherentLabel(complex(float(text), 0.0))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"cannot parse w0 value {text!r}: {exc}") from None


def parse_deltas(text: str) -> tuple[float, ...]:
    # values above 1 are admitted so that `check` can probe the quasi-density
    # failure mode; figure runs re-validate against [0, 1]
    try:
        vals = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}: {exc}") from None
    if not vals or any(v < 0.0 for v in vals):
        raise argparse.ArgumentTypeError("delta values must be nonnegative")
    return vals


def parse_quad(text: str) -> QuadratureSpec:
    try:
        n_q, n_p = (int(part) for part in text.split(","))
        return QuadratureSpec(n_q, n_p)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad quadrature {text!r}: {exc}") from None


_PARSERS = {
    "w0A": parse_w0, "w0B": parse_w0, "w0": parse_w0,
    "delta": parse_deltas, "quad": parse_quad,
    "tau_max": float, "tau": float, "alpha": float,
    "p0A": float, "p0B": float,
    "steps": int, "seed": int, "restarts": int, "n": int,
    "out": str, "fast": lambda s: s.strip().lower() in ("1", "true", "yes"),
}


def _echo_w0(label: CoherentLabel) -> str:
    if label.at_infinity:
        return "inf"
    return f"{_fmt(label.w.real)},{_fmt(label.w.imag)}"


def load_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment; keys match the long flag names."""
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise argparse.ArgumentTypeError(f"config line without '=': {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _PARSERS:
            raise argparse.ArgumentTypeError(f"unknown config key {key!r}")
        values[key] = _PARSERS[key](val.strip())
    return values


def _resolve(args, file_cfg: dict, builtin: dict) -> dict:
    """Flag > config file > builtin default, per key."""
    out = {}
    for key, default in builtin.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in file_cfg:
            out[key] = file_cfg[key]
        else:
            out[key] = default
    return out


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--w0A", type=parse_w0, default=None,
                   help='initial label of spin A: "re,im", "q0:p0", or a real')
    p.add_argument("--w0B", type=parse_w0, default=None, help="initial label of spin B")
    p.add_argument("--delta", type=parse_deltas, default=None,
                   help="comma-separated shape parameters in [0, 1]")
    p.add_argument("--tau-max", dest="tau_max", type=float, default=None)
    p.add_argument("--steps", type=int, default=None, help="number of tau rows")
    p.add_argument("--quad", type=parse_quad, default=None, help="quadrature nodes 'nq,np'")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--out", type=str, default=None, help="output path (default: stdout)")
    p.add_argument("--fast", action="store_const", const=True, default=None,
                   help="coarse (32,32) quadrature, convergence gate off")
    p.add_argument("--config", type=str, default=None, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbell",
        description="Two-qubit entanglement vs. a classical hidden-variable model under CHSH tests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("fig1", "quantum CHSH maximum and violation quantifier over tau"),
        ("fig2", "entanglement vs. classical inseparability and both CHSH maxima"),
        ("check", "run the invariant suite"),
    ):
        sp = sub.add_parser(name, help=desc)
        _add_common(sp)
    ev = sub.add_parser("eval", help="print one named scalar at full precision")
    _add_common(ev)
    ev.add_argument("quantity", choices=EVAL_QUANTITIES)
    ev.add_argument("--w0", type=parse_w0, default=None, help="set both w0A and w0B")
    ev.add_argument("--tau", type=float, default=None)
    ev.add_argument("--alpha", type=float, default=None)
    ev.add_argument("--p0A", type=float, default=None)
    ev.add_argument("--p0B", type=float, default=None)
    ev.add_argument("--n", type=int, default=None, help="stroboscopic index for gamma factors")
    return parser


def _emit(out: str | None, comments: list[str], header: list[str], rows: list[list[str]]):
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config_comments(name: str, cfg: dict, extra: dict | None = None) -> list[str]:
    comments = [f"spinbell {name}"]
    for key in sorted(cfg):
        if key == "out":  # path noise, not experiment configuration
            continue
        val = cfg[key]
        if isinstance(val, CoherentLabel):
            val = _echo_w0(val)
        elif isinstance(val, QuadratureSpec):
            val = f"{val.n_q},{val.n_p}"
        elif isinstance(val, tuple):
            val = ",".join(_fmt(v) for v in val)
        elif isinstance(val, float):
            val = _fmt(val)
        comments.append(f"{key}={val}")
    for key, val in (extra or {}).items():
        comments.append(f"{key}={val}")
    return comments


def _spot_check(t_matrix, closed_value: float, seed: int, restarts: int, failures: list):
    res = chsh.bmax_optimize(t_matrix, seed=seed, restarts=restarts)
    if not res.landscape_ok:
        failures.append(f"optimizer landscape warning (top-two gap {res.top_two_gap:.2e})")
    elif abs(res.value - closed_value) > SPOT_TOL:
        failures.append(
            f"optimizer {res.value:.9f} vs closed form {closed_value:.9f}"
        )


def cmd_fig1(args) -> int:
    builtin = dict(
        w0A=CoherentLabel(complex(1 / math.sqrt(2))), w0B=CoherentLabel(complex(1 / math.sqrt(2))),
        tau_max=6 * math.pi, steps=601, quad=QuadratureSpec(), seed=7, restarts=16,
        out=None, fast=False,
    )
    cfg = _resolve(args, _file_cfg(args), builtin)
    if cfg["steps"] < 2:
        raise argparse.ArgumentTypeError("steps must be >= 2")
    taus = np.linspace(0.0, cfg["tau_max"], cfg["steps"])
    psi0 = quantum.product_state(cfg["w0A"], cfg["w0B"])
    cq = np.empty_like(taus)
    bmax = np.empty_like(taus)
    failures: list[str] = []
    for k, t in enumerate(taus):
        psi = quantum.evolve(psi0, t)
        cq[k] = 1.0 - 0.5 * (
            quantum.purity(quantum.reduce(psi, "A")) + quantum.purity(quantum.reduce(psi, "B"))
        )
        tq = quantum.pauli_correlation_matrix(psi)
        bmax[k] = chsh.bmax_closed_form(tq).value
        if k % SPOT_STRIDE_QUANTUM == 0:
            _spot_check(tq, bmax[k], cfg["seed"] + k, cfg["restarts"], failures)
    peak = float(np.max(cq))
    eps = cq / peak if peak > 0 else np.zeros_like(cq)
    extra = {"min_bmax_quantum": _fmt(np.min(bmax)), "max_bmax_quantum": _fmt(np.max(bmax))}
    try:
        vio = chsh.violation_quantifier(bmax)
    except DegenerateNormalizationError:
        # e.g. a grid that never sees a violation; keep the rows, mark the column
        vio = np.full_like(bmax, math.nan)
        extra["violation_normalization"] = "degenerate"
    comments = _config_comments("fig1", cfg, extra)
    header = ["tau", "cq", "epsilon", "bmax_quantum", "violation_V"]
    rows = [
        [_fmt(taus[k]), _fmt(cq[k]), _fmt(eps[k]), _fmt(bmax[k]), _fmt(vio[k])]
        for k in range(len(taus))
    ]
    _emit(cfg["out"], comments, header, rows)
    for msg in failures:
        print(f"spinbell fig1: {msg}", file=sys.stderr)
    return 1 if failures else 0


def cmd_fig2(args) -> int:
    builtin = dict(
        w0A=CoherentLabel(complex(1.0)), w0B=CoherentLabel(complex(1.0)),
        delta=(0.2, 0.6, 1.0), tau_max=6 * math.pi, steps=601,
        quad=QuadratureSpec(), seed=7, restarts=16, out=None, fast=False,
    )
    cfg = _resolve(args, _file_cfg(args), builtin)
    if cfg["steps"] < 2:
        raise argparse.ArgumentTypeError("steps must be >= 2")
    if any(d > 1.0 for d in cfg["delta"]):
        raise argparse.ArgumentTypeError("fig2 delta values must lie in [0, 1]")
    quad = QuadratureSpec(32, 32) if cfg["fast"] else cfg["quad"]
    gate = None if cfg["fast"] else GATE_TOL
    taus = np.linspace(0.0, cfg["tau_max"], cfg["steps"])
    deltas = cfg["delta"]
    x0a = phase_point_from_w(cfg["w0A"])
    x0b = phase_point_from_w(cfg["w0B"])
    specs = [DistributionSpec(d, x0a, x0b) for d in deltas]
    labels = [f"d{int(round(d * 10)):02d}" for d in deltas]

    psi0 = quantum.product_state(cfg["w0A"], cfg["w0B"])
    cq = np.empty_like(taus)
    bmax_q = np.empty_like(taus)
    ccl = np.empty((len(deltas), taus.size))
    bmax_cl = np.empty((len(deltas), taus.size))
    failures: list[str] = []
    for k, t in enumerate(taus):
        psi = quantum.evolve(psi0, t)
        cq[k] = 1.0 - 0.5 * (
            quantum.purity(quantum.reduce(psi, "A")) + quantum.purity(quantum.reduce(psi, "B"))
        )
        tq = quantum.pauli_correlation_matrix(psi)
        bmax_q[k] = chsh.bmax_closed_form(tq).value
        if k % SPOT_STRIDE_QUANTUM == 0:
            _spot_check(tq, bmax_q[k], cfg["seed"] + k, cfg["restarts"], failures)
        for i, spec in enumerate(specs):
            ccl[i, k] = classical.ccl_numeric(spec, t, quad, gate=gate)
            tcl = classical.classical_correlation_matrix(spec, t, quad, gate=gate)
            bmax_cl[i, k] = chsh.bmax_closed_form(tcl).value
            if k % SPOT_STRIDE_CLASSICAL == 0:
                _spot_check(tcl, bmax_cl[i, k], cfg["seed"] + 7919 * i + k, cfg["restarts"], failures)
    comments = _config_comments(
        "fig2", cfg,
        {
            "gate": "off" if gate is None else _fmt(gate),
            "min_bmax_quantum": _fmt(np.min(bmax_q)),
            "max_bmax_classical": _fmt(np.max(bmax_cl)),
        },
    )
    header = (
        ["tau", "cq"] + [f"ccl_{lab}" for lab in labels]
        + ["bmax_quantum"] + [f"bmax_cl_{lab}" for lab in labels]
    )
    rows = []
    for k in range(taus.size):
        row = [_fmt(taus[k]), _fmt(cq[k])]
        row += [_fmt(ccl[i, k]) for i in range(len(deltas))]
        row.append(_fmt(bmax_q[k]))
        row += [_fmt(bmax_cl[i, k]) for i in range(len(deltas))]
        rows.append(row)
    _emit(cfg["out"], comments, header, rows)
    for msg in failures:
        print(f"spinbell fig2: {msg}", file=sys.stderr)
    return 1 if failures else 0


def cmd_check(args) -> int:
    builtin = dict(
        delta=(0.2, 0.6, 1.0), quad=QuadratureSpec(), seed=7, out=None, fast=False,
    )
    cfg = _resolve(args, _file_cfg(args), builtin)
    quad = QuadratureSpec(32, 32) if cfg["fast"] else cfg["quad"]
    results = run_all_checks(deltas=cfg["delta"], quad=quad, seed=cfg["seed"])
    for res in results:
        mark = "PASS" if res.passed else "FAIL"
        print(f"{mark} {res.name}: {res.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if cfg["out"]:
        comments = _config_comments("check", cfg)
        rows = [
            [r.name, "1" if r.passed else "0", r.detail.replace(",", ";")]
            for r in results
        ]
        _emit(cfg["out"], comments, ["name", "passed", "detail"], rows)
    return 1 if failed else 0


def _require(cfg: dict, quantity: str, *keys: str):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise argparse.ArgumentTypeError(
            f"eval {quantity} needs --{', --'.join(missing)}"
        )


def cmd_eval(args) -> int:
    file_cfg = _file_cfg(args)
    builtin = dict(
        w0A=None, w0B=None, w0=None, tau=None, alpha=None, p0A=None, p0B=None,
        n=None, delta=None, quad=QuadratureSpec(), seed=7, restarts=16, fast=False, out=None,
    )
    cfg = _resolve(args, file_cfg, builtin)
    q = args.quantity
    w0a = cfg["w0A"] or cfg["w0"] or CoherentLabel(complex(1.0))
    w0b = cfg["w0B"] or cfg["w0"] or CoherentLabel(complex(1.0))
    delta = cfg["delta"][0] if cfg["delta"] else 1.0
    quad = QuadratureSpec(32, 32) if cfg["fast"] else cfg["quad"]

    if q == "cq":
        _require(cfg, q, "tau")
        value = quantum.cq_numeric(w0a, w0b, cfg["tau"])
    elif q == "ccl":
        _require(cfg, q, "tau")
        spec = DistributionSpec(delta, phase_point_from_w(w0a), phase_point_from_w(w0b))
        value = classical.ccl_numeric(spec, cfg["tau"], quad)
    elif q == "bmax_q":
        _require(cfg, q, "tau")
        psi = quantum.evolve(quantum.product_state(w0a, w0b), cfg["tau"])
        value = chsh.bmax_closed_form(quantum.pauli_correlation_matrix(psi)).value
    elif q == "bmax_cl":
        _require(cfg, q, "tau")
        spec = DistributionSpec(delta, phase_point_from_w(w0a), phase_point_from_w(w0b))
        value = chsh.bmax_closed_form(
            classical.classical_correlation_matrix(spec, cfg["tau"], quad)
        ).value
    elif q in ("gamma_q", "gamma_cl"):
        _require(cfg, q, "n")
        gq, gcl = reference.gamma_factors(cfg["n"], delta)
        value = gq if q == "gamma_q" else gcl
    elif q in ("u_q", "v_q", "u_cl", "v_cl"):
        _require(cfg, q, "tau")
        uv = reference.corr_uv_closed(cfg["tau"], delta)
        value = getattr(uv, q)
    elif q == "ccl_limit":
        _require(cfg, q, "alpha")
        value = reference.ccl_limit(delta, cfg["alpha"])
    elif q in ("omega_q", "omega_cl"):
        _require(cfg, q, "p0A", "p0B")
        wq, wcl = reference.short_time_coeffs(cfg["p0A"], cfg["p0B"])
        value = wq if q == "omega_q" else wcl
    else:  # unreachable, argparse constrains choices
        raise argparse.ArgumentTypeError(f"unknown quantity {q!r}")
    print(_fmt(value))
    return 0


def _file_cfg(args) -> dict:
    if getattr(args, "config", None):
        return load_config_file(args.config)
    return {}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"fig1": cmd_fig1, "fig2": cmd_fig2, "check": cmd_check, "eval": cmd_eval}
    try:
        return handlers[args.command](args)
    except argparse.ArgumentTypeError as exc:
        print(f"spinbell: {exc}", file=sys.stderr)
        return 2
    except (DegenerateNormalizationError, QuadratureConvergenceError) as exc:
        print(f"spinbell: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
