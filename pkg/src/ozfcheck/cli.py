"""Command-line interface.

Every subcommand prints one JSON document (or a CSV table) on stdout.  Exit
status is 0 when the analysis completes, 2 when ``phase-check`` finds a
certificate and 1 on invalid input.  Angles are reported in degrees.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from ._json import dumps
from .criterion import (CoprimePair, CriterionConfig, MultiplierClass, check_plant,
                        critical_slope, scan_pair)
from .duality import DelayFamily, build_certificate, verify_general
from .errors import OZFError
from .interval import IntervalProblem, limit_sup, sup_ratio
from .luryesim import LuryeConfig, nyquist_gain, periodicity_estimate, realize, simulate
from .multiplier import (DelayCombo, class_membership, is_suitable, multiplier_from_dict,
                         rational_membership)
from .plants import double_resonance, lightly_damped_pair
from .xferfn import DelayedRational, FrequencyGrid, ShiftedPlant, plant_from_dict

__all__ = ["RunConfig", "run", "main", "build_parser", "FAMILIES"]

COMMANDS = ("phase-check", "critical-slope", "verify-multiplier", "duality-cert",
            "interval-rho", "simulate", "nyquist-gain", "sweep")

# one-parameter plant families for ``sweep``
FAMILIES = {
    "double-resonance": double_resonance,
    "lightly-damped-pair": lambda alpha: lightly_damped_pair(alpha=alpha),
}


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    plant_path: str = None
    parameters: dict = field(default_factory=dict)
    output: str = "json-stdout"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"command: unknown command {self.command!r}")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with "certificate found"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sign(text):
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    if text not in table:
        raise argparse.ArgumentTypeError("sign must be + or -")
    return table[text]


def _floats(text):
    if text.strip() == "":
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers")


def _add_grid(p):
    p.add_argument("--wmin", type=float, default=1e-3)
    p.add_argument("--wmax", type=float, default=1e3)
    p.add_argument("--n-grid", "--grid", dest="n_grid", type=int, default=4001)
    p.add_argument("--no-resonance-clusters", action="store_true",
                   help="use the plain grid without dense clusters at lightly damped roots")


def _add_plant(p, slope=True):
    p.add_argument("--plant", required=True, help="plant JSON file")
    if slope:
        p.add_argument("--k", type=float, default=None, help="slope bound: analyse 1/k + sign*G")
        p.add_argument("--sign", type=_sign, default=None, help="feedback sign, + or -")


def _add_class(p):
    p.add_argument("--class", dest="mclass", choices=[c.value for c in MultiplierClass],
                   default="monotone")


def build_parser():
    parser = _Parser(prog="ozfcheck", description="Frequency-domain tests for Zames-Falb multipliers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for pair scans (default: $OZF_THREADS or 1)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("phase-check", help="search for a two-frequency phase certificate")
    _add_plant(p)
    _add_class(p)
    _add_grid(p)
    p.add_argument("--a-cap", "--a-max", dest="a_cap", type=int, default=20)
    p.add_argument("--b-cap", "--b-max", dest="b_cap", type=int, default=20)
    p.add_argument("--no-refine", action="store_true", help="skip golden-section polishing")

    p = sub.add_parser("critical-slope", help="bisect for the slope where the criterion first fires")
    _add_plant(p, slope=False)
    p.add_argument("--sign", type=_sign, default=None)
    _add_class(p)
    _add_grid(p)
    p.add_argument("--k-lo", type=float, required=True)
    p.add_argument("--k-hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--a-cap", "--a-max", dest="a_cap", type=int, default=20)
    p.add_argument("--b-cap", "--b-max", dest="b_cap", type=int, default=20)
    p.add_argument("--no-refine", action="store_true", help="skip golden-section polishing")

    p = sub.add_parser("verify-multiplier", help="check a candidate multiplier")
    _add_plant(p)
    _add_grid(p)
    p.add_argument("--multiplier", required=True, help="multiplier JSON file")
    p.add_argument("--eps", type=float, default=0.0)

    p = sub.add_parser("duality-cert", help="two-frequency dual certificate")
    _add_plant(p)
    _add_class(p)
    _add_grid(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--omega0", type=float, default=None,
                   help="base frequency (default: maximiser of the phase gap)")

    p = sub.add_parser("interval-rho", help="interval-approach thresholds")
    for name in ("alpha", "beta", "gamma", "delta"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--odd", action="store_true")

    p = sub.add_parser("simulate", help="time response of the Lurye loop")
    _add_plant(p, slope=False)
    p.add_argument("--gain", type=float, required=True)
    p.add_argument("--sat", default="1", help="saturation level, or 'off'")
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-final", type=float, default=200.0)
    p.add_argument("--out", default=None, help="CSV trace file (t,u1,y1,saturated)")

    p = sub.add_parser("nyquist-gain", help="gain at the first negative real-axis crossing")
    _add_plant(p, slope=False)

    p = sub.add_parser("sweep", help="repeat an analysis over a plant family")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--param", default="value", help="column name for the swept parameter")
    p.add_argument("--values", type=_floats, required=True)
    p.add_argument("--inner", choices=("critical-slope", "phase-check"), default="critical-slope")
    p.add_argument("--sign", type=_sign, default=1)
    _add_class(p)
    _add_grid(p)
    p.add_argument("--k", type=float, default=None, help="slope for phase-check rows")
    p.add_argument("--k-lo", type=float, default=1.0)
    p.add_argument("--k-hi", type=float, default=1e3)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--a-cap", "--a-max", dest="a_cap", type=int, default=20)
    p.add_argument("--b-cap", "--b-max", dest="b_cap", type=int, default=20)
    p.add_argument("--no-refine", action="store_true", help="skip golden-section polishing")
    p.add_argument("--out", default=None, help="CSV file (default: stdout)")
    return parser


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path!r}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")


def _plant(cfg):
    plant = plant_from_dict(_load_json(cfg.plant_path, "plant"))
    prm = cfg.parameters
    sign = prm.get("sign") or plant.sign
    if prm.get("k") is not None:
        return ShiftedPlant.from_slope(plant.base, prm["k"], sign)
    return ShiftedPlant(plant.base, plant.offset, sign)


def _rational(cfg):
    """Plant file as a bare transfer function (sign folded into the numerator)."""
    plant = plant_from_dict(_load_json(cfg.plant_path, "plant"))
    if plant.offset != 0.0:
        raise InputError("plant.offset: must be 0 for this command")
    sign = cfg.parameters.get("sign") or plant.sign
    base = plant.base
    return DelayedRational([sign * c for c in base.num], base.den, base.delay)


def _grid(prm):
    return FrequencyGrid(prm.get("wmin", 1e-3), prm.get("wmax", 1e3), prm.get("n_grid", 4001),
                         resolve_resonances=not prm.get("no_resonance_clusters", False))


def _threads(prm):
    t = prm.get("threads")
    if t is None:
        t = int(os.environ.get("OZF_THREADS", "1") or 1)
    if t < 1:
        raise InputError("threads: must be >= 1")
    return t


def _criterion_config(prm):
    return CriterionConfig(_grid(prm), prm.get("a_cap", 20), prm.get("b_cap", 20),
                           refine=not prm.get("no_refine", False), threads=_threads(prm))


def _phase_check(cfg):
    cert = check_plant(_plant(cfg), cfg.parameters["mclass"], _criterion_config(cfg.parameters))
    return (2 if cert else 0), {"violation": cert.to_dict() if cert else None}


def _critical_slope(cfg):
    prm = cfg.parameters
    plant = plant_from_dict(_load_json(cfg.plant_path, "plant"))
    res = critical_slope(plant.base, prm.get("sign") or plant.sign, prm["mclass"],
                         prm["k_lo"], prm["k_hi"], prm["tol"], _criterion_config(prm))
    return 0, res.to_dict()


def _verify_multiplier(cfg):
    prm = cfg.parameters
    M = multiplier_from_dict(_load_json(prm["multiplier"], "multiplier"))
    report = is_suitable(M, _plant(cfg), _grid(prm), prm["eps"])
    if isinstance(M, DelayCombo):
        membership = {"verdict": class_membership(M).value}
    else:
        membership = rational_membership(M).to_dict()
    return 0, {"suitability": report.to_dict(), "membership": membership}


def _duality_cert(cfg):
    prm = cfg.parameters
    plant = _plant(cfg)
    pair = CoprimePair(prm["a"], prm["b"])
    w0 = prm.get("omega0")
    if w0 is None:
        cert = scan_pair(plant, pair, prm["mclass"], _grid(prm), margin=-math.inf)
        w0 = cert.omega0
    cert = build_certificate(plant, pair, w0, prm["mclass"])
    out = cert.to_dict()
    sup, tau = verify_general(cert.instance(plant), DelayFamily.MMINUS)
    out.update(verify_sup_minus=sup, tau_star_minus=tau, holds=cert.holds())
    if cert.mclass is MultiplierClass.ODD:
        sup, tau = verify_general(cert.instance(plant), DelayFamily.MPLUS)
        out.update(verify_sup_plus=sup, tau_star_plus=tau)
    return 0, out


def _interval_rho(cfg):
    prm = cfg.parameters
    ends = [prm.get(k) for k in ("alpha", "beta", "gamma", "delta")]
    if all(v is not None for v in ends):
        problem = IntervalProblem(*ends, kappa=prm["kappa"])
        rho, t = sup_ratio(problem, odd=prm["odd"])
        mode = "interval"
    elif prm.get("a") is not None and prm.get("b") is not None and not any(v is not None for v in ends):
        rho, t = limit_sup(CoprimePair(prm["a"], prm["b"]), prm["kappa"], odd=prm["odd"])
        mode = "limit"
    else:
        raise InputError("interval-rho: give either --alpha --beta --gamma --delta or --a --b")
    return 0, {"rho": rho, "arg_t": t, "mode": mode, "odd": prm["odd"],
               "threshold_deg": 90.0 + math.degrees(math.atan(rho))}


def _simulate(cfg):
    prm = cfg.parameters
    tf = _rational(cfg)
    sat = str(prm["sat"]).lower()
    if sat == "off":
        level, nl = 1.0, "none"
    else:
        try:
            level, nl = float(sat), "saturation"
        except ValueError:
            raise InputError("sat: expected a positive level or 'off'")
    lc = LuryeConfig(realize(tf), prm["gain"], level, prm["step"], prm["dt"], prm["t_final"], nl)
    trace = simulate(lc)
    if prm.get("out"):
        with open(prm["out"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "u1", "y1", "saturated"])
            for row in zip(trace.t, trace.u1, trace.y1, trace.saturated):
                w.writerow([format(row[0], ".17g"), format(row[1], ".17g"),
                            format(row[2], ".17g"), int(row[3])])
    summary = periodicity_estimate(trace, step=prm["step"]).to_dict()
    return 0, {"samples": len(trace.t), "diverged": trace.diverged, "periodicity": summary,
               "out": prm.get("out")}


def _nyquist(cfg):
    k, w = nyquist_gain(_rational(cfg), return_omega=True)
    return 0, {"k_N": k, "omega_cross": w}


def _sweep(cfg):
    prm = cfg.parameters
    family = FAMILIES[prm["family"]]
    ccfg = _criterion_config(prm)
    rows = []
    for v in prm["values"]:
        row = {prm["param"]: v, "k_star": "", "a": "", "b": "", "omega0": "", "error": ""}
        try:
            G = family(v)
            if prm["inner"] == "critical-slope":
                res = critical_slope(G, prm["sign"], prm["mclass"], prm["k_lo"], prm["k_hi"],
                                     prm["tol"], ccfg)
                cert = res.certificate
                row["k_star"] = format(res.k_star, ".17g")
            else:
                k = prm.get("k") or math.inf
                cert = check_plant(ShiftedPlant.from_slope(G, k, prm["sign"]), prm["mclass"], ccfg)
                if cert is None:
                    row["error"] = "no violation"
            if cert is not None:
                row.update(a=cert.pair.a, b=cert.pair.b, omega0=format(cert.omega0, ".17g"))
        except (OZFError, ValueError) as exc:
            row["error"] = str(exc)
        rows.append(row)
    buf = io.StringIO()
    w = csv.DictWriter(buf, [prm["param"], "k_star", "a", "b", "omega0", "error"],
                       lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return 0, buf.getvalue()


HANDLERS = {
    "phase-check": _phase_check, "critical-slope": _critical_slope,
    "verify-multiplier": _verify_multiplier, "duality-cert": _duality_cert,
    "interval-rho": _interval_rho, "simulate": _simulate, "nyquist-gain": _nyquist,
    "sweep": _sweep,
}


def run(config):
    """Execute a :class:`RunConfig`; returns ``(exit_status, text)``."""
    try:
        status, result = HANDLERS[config.command](config)
    except (OZFError, ValueError, ArithmeticError) as exc:
        return 1, dumps({"error": str(exc), "type": type(exc).__name__})
    text = result if isinstance(result, str) else dumps(result)
    return status, text


def main(argv=None):
    args = build_parser().parse_args(argv)
    prm = vars(args).copy()
    command = prm.pop("command")
    plant_path = prm.pop("plant", None)
    out = prm.get("out")
    cfg = RunConfig(command, plant_path, prm, out or "json-stdout")
    status, text = run(cfg)
    if command == "sweep" and out and status != 1:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        stream = sys.stderr if status == 1 else sys.stdout
        stream.write(text if text.endswith("\n") else text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
