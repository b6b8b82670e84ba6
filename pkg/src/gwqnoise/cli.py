"""Command-line front end.

Exit codes: 0 success, 1 usage or config error, 2 some result carries a
validity flag, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import interferometer as ifo
from . import noise, states, verify
from .detector import DetectorConfig
from .su2 import moments_of

EXIT_OK, EXIT_USAGE, EXIT_FLAGGED, EXIT_VERIFY = 0, 1, 2, 3
SWEEP_VARS = ("nbar", "r", "eta", "phi", "gamma")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.8e}"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARS:
            raise UsageError(f"sweep variable must be one of {SWEEP_VARS}, got {self.variable!r}")
        if not self.lo < self.hi:
            raise UsageError("sweep needs min < max")
        if self.points < 2:
            raise UsageError("sweep needs at least 2 points")
        if self.scale not in ("linear", "log"):
            raise UsageError(f"sweep scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise UsageError("log sweep needs min > 0")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise UsageError(f"--sweep expects var:min:max:points[:scale], got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]),
                       parts[4] if len(parts) == 5 else "linear")
        except ValueError as exc:
            raise UsageError(f"malformed --sweep {text!r}: {exc}") from None

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ReportRow:
    value: float
    dz_pc: float
    dz_rp: float
    dz_total: float
    power_W: float
    flags: tuple[str, ...] = ()

    @classmethod
    def from_budget(cls, value: float, b: noise.NoiseBudget, extra=()) -> "ReportRow":
        return cls(value, b.dz_pc, b.dz_rp, b.dz_total, b.power, tuple(b.flags) + tuple(extra))

    def csv_fields(self) -> list[str]:
        return [fmt(self.value), fmt(self.dz_pc), fmt(self.dz_rp), fmt(self.dz_total),
                fmt(self.power_W), ";".join(self.flags)]

    def to_json(self, variable: str) -> dict:
        return {variable: self.value, "dz_pc": self.dz_pc, "dz_rp": self.dz_rp,
                "dz_total": self.dz_total, "power_W": self.power_W, "flags": list(self.flags)}


def header(variable: str) -> list[str]:
    return [variable, "dz_pc", "dz_rp", "dz_total", "power_W", "flags"]


# -- helpers ---------------------------------------------------------------------

def load_config(source: str) -> DetectorConfig:
    try:
        return DetectorConfig.load(source)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid config {source!r}: {exc}") from None


def state_spec(args) -> states.InputStateSpec:
    fam = args.family
    alpha = complex(args.alpha)
    if fam == "coherent":
        return states.CoherentVacuum(alpha)
    if fam == "squeezed":
        return states.CoherentSqueezed(alpha, args.r, args.theta)
    if fam == "twin-fock":
        return states.TwinFock(args.n)
    if fam == "intelligent":
        return states.Intelligent(args.j2, args.eta, args.m0x2)
    raise UsageError(f"family {fam!r} has no explicit state; choose coherent, squeezed, twin-fock or intelligent")


def model_params(args) -> dict:
    if args.family == "squeezed":
        return {"r": args.r, "mode": args.mode}
    if args.family == "intelligent":
        return {"m0": args.m0x2 / 2}
    return {}


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out!r}: {exc}") from None


def render_table(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\r\n").writerows(rows)
    return buf.getvalue()


def render_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- commands ------------------------------------------------------------------------

def cmd_sql(args) -> int:
    config = load_config(args.config)
    z = noise.sql(config)
    values = {
        "sql_m": z,
        "tau_s": config.tau,
        "bounces": config.bounces,
        "omega_rad_s": config.omega,
        "a_pc_m2": config.a_pc,
        "a_rp_m2": config.a_rp,
        "strain_scale": z / config.arm_length,
    }
    if args.format == "json":
        emit(render_json({"command": "sql", "config": config.to_json(), **values}), args.out)
    else:
        rows = [["quantity", "value"]] + [[k, fmt(v)] for k, v in values.items()]
        emit(render_table(rows), args.out)
        sys.stderr.write(f"# gravitational-wave amplitudes h above ~{fmt(z / config.arm_length)} "
                         "become measurable at the SQL\n")
    return EXIT_OK


def cmd_budget(args) -> int:
    config = load_config(args.config)
    if args.nbar is None:
        raise UsageError("budget needs --nbar")
    model = noise.family_model(args.family, config, **model_params(args))
    b = model.budget(args.nbar)
    extra = _loss_flags(args.nbar, args.gamma)
    row = ReportRow.from_budget(args.nbar, b, extra)
    _write_rows(args, "nbar", [row], {"command": "budget", "family": args.family})
    return EXIT_FLAGGED if row.flags else EXIT_OK


def cmd_optimum(args) -> int:
    config = load_config(args.config)
    opt = noise.family_optimum(args.family, config, **model_params(args))
    base = noise.family_optimum("coherent", config)
    values = {
        "family": args.family,
        "nbar_opt": opt.nbar_opt,
        "power_opt_W": opt.power_opt,
        "dz_opt_m": opt.dz_opt,
        "sql_m": noise.sql(config),
        "power_ratio_to_coherent": opt.power_opt / base.power_opt,
        "power_reduction_factor": base.power_opt / opt.power_opt,
        "method": opt.method.value,
    }
    if args.format == "json":
        emit(render_json({"command": "optimum", **values}), args.out)
    else:
        rows = [["quantity", "value"]]
        rows += [[k, v if isinstance(v, str) else fmt(v)] for k, v in values.items()]
        emit(render_table(rows), args.out)
    return EXIT_OK


def _loss_flags(nbar: float, gamma: float | None):
    if gamma is None:
        return ()
    return () if noise.loss_threshold_check(nbar, gamma).ok else ("loss-violated",)


def _sweep_rows(args, spec: SweepSpec, config: DetectorConfig) -> list[ReportRow]:
    grid = spec.grid()
    rows = []
    if spec.variable == "nbar":
        model = noise.family_model(args.family, config, **model_params(args))
        for n in grid:
            rows.append(ReportRow.from_budget(n, model.budget(n), _loss_flags(n, args.gamma)))
    elif spec.variable == "r":
        for r in grid:
            opt = noise.family_optimum("squeezed", config, r=r, mode=args.mode)
            rows.append(ReportRow.from_budget(r, opt.budget, _loss_flags(opt.nbar_opt, args.gamma)))
    elif spec.variable == "eta":
        if args.j2 is None:
            raise UsageError("eta sweep needs --j2")
        for eta in grid:
            if eta == 0:
                n = float(args.j2)
                b = noise.budget_intelligent_limit(n, args.m0x2 / 2, config)
            else:
                sol = states.solve_intelligent_state(args.j2 / 2, eta, args.m0x2 / 2)
                b = noise.budget_from_moments(moments_of(sol.state), config)
            rows.append(ReportRow.from_budget(eta, b, _loss_flags(b.nbar, args.gamma)))
    elif spec.variable == "phi":
        state = states.spec_to_state(state_spec(args))
        observable = ifo.Observable(args.observable or
                                    ("sqdiff" if args.family == "twin-fock" else "qdiff"))
        m = moments_of(state)
        rp = math.sqrt(config.a_rp) * 2 * math.sqrt(m.var_jx)
        power = config.power(m.nbar)
        for phi in grid:
            try:
                dphi = ifo.phase_uncertainty(state, observable, phi).value
                pc, flags = dphi / config.phase_gain, ()
            except ifo.VanishingDerivativeError:
                pc, flags = math.inf, ("zero-slope",)
            rows.append(ReportRow(phi, pc, rp, math.hypot(pc, rp), power,
                                  flags + _loss_flags(m.nbar, args.gamma)))
    else:
        model = noise.family_model(args.family, config, **model_params(args))
        n = args.nbar if args.nbar is not None else noise.family_optimum(
            args.family, config, **model_params(args)).nbar_opt
        b = model.budget(n)
        for gamma in grid:
            rows.append(ReportRow.from_budget(gamma, b, _loss_flags(n, gamma)))
    return rows


def _write_rows(args, variable: str, rows: list[ReportRow], meta: dict):
    if args.format == "json":
        emit(render_json({**meta, "variable": variable, "rows": [r.to_json(variable) for r in rows]}),
             args.out)
    else:
        emit(render_table([header(variable)] + [r.csv_fields() for r in rows]), args.out)


def cmd_sweep(args) -> int:
    if not args.sweep:
        raise UsageError("sweep needs --sweep var:min:max:points[:scale]")
    spec = SweepSpec.parse(args.sweep)
    config = load_config(args.config)
    rows = _sweep_rows(args, spec, config)
    _write_rows(args, spec.variable, rows, {"command": "sweep", "family": args.family})
    return EXIT_FLAGGED if any(r.flags for r in rows) else EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks(args.level, seed=args.seed)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        emit(render_json({
            "command": "verify", "level": args.level, "seed": args.seed, "prng": verify.PRNG_NAME,
            "checks": [{"name": r.name, "passed": r.passed, "worst": r.worst, "tol": r.tol,
                        "seconds": r.seconds} for r in results],
            "passed": not failed,
        }), args.out)
    else:
        rows = [["check", "status", "worst", "tol"]]
        rows += [[r.name, "PASS" if r.passed else "FAIL", fmt(r.worst), fmt(r.tol)] for r in results]
        emit(render_table(rows), args.out)
        sys.stderr.write(f"# seed={args.seed} prng={verify.PRNG_NAME} "
                         f"{len(results) - len(failed)}/{len(results)} passed\n")
    for r in failed:
        sys.stderr.write(f"FAILED invariant: {r.name} (worst {r.worst:.3e} > tol {r.tol:.1e})\n")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="initial-ligo", help="preset name or JSON file")
    common.add_argument("--family", default="coherent", choices=noise.FAMILIES)
    common.add_argument("--alpha", type=complex, default=1.0)
    common.add_argument("--r", type=float, default=0.0)
    common.add_argument("--theta", type=float, default=0.0)
    common.add_argument("--n", type=int, default=1)
    common.add_argument("--j2", type=int, default=None)
    common.add_argument("--eta", type=float, default=0.5)
    common.add_argument("--m0x2", type=int, default=0)
    common.add_argument("--nbar", type=float, default=None)
    common.add_argument("--mode", choices=("exact", "asymptotic"), default="exact")
    common.add_argument("--sweep", default=None, help="var:min:max:points[:linear|log]")
    common.add_argument("--observable", choices=("qdiff", "sqdiff"), default=None)
    common.add_argument("--gamma", type=float, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)

    parser = _Parser(prog="gwqnoise", description="Quantum noise budgets for interferometric detectors.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("sql", parents=[common], help="standard quantum limit and derived constants")
    sub.add_parser("budget", parents=[common], help="noise budget at one photon number")
    sub.add_parser("optimum", parents=[common], help="optimum light power for a family")
    sub.add_parser("sweep", parents=[common], help="CSV/JSON parameter sweep")
    p = sub.add_parser("verify", parents=[common], help="run the oracle checks")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


COMMANDS = {"sql": cmd_sql, "budget": cmd_budget, "optimum": cmd_optimum,
            "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.family == "intelligent" and args.j2 is None and args.command == "sweep":
        args.j2 = 2
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"gwqnoise: error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        sys.stderr.write(f"gwqnoise: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
