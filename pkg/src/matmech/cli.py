"""Command-line front end.

    matmech spectrum | solve | verify | evolve | elements [options]

Parameters come from an optional config file (JSON, or ``key = value``
lines whose values are JSON literals) with flags taking precedence.
Exit codes: 0 pass, 1 verification failure, 2 usage/config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

import matmech
from matmech import ladder_solver, rotor_model
from matmech.heisenberg_dynamics import (
    AmplitudeState,
    MixedState,
    StateError,
    evolve_operator,
    expectation_series,
)
from matmech.operator_core import (
    IndexRange,
    adjoint,
    commutator,
    identity,
    interior_view,
    multiply,
)
from matmech.rotor_model import PhysicalParams
from matmech.schrodinger_oracle import AngularGrid, GridError, grid_evolve_expectation

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OBSERVABLES = ("x", "y", "L", "H", "p_x", "p_y", "sin_phi", "cos_phi")
STATE_MARGIN = 2


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    range_N: int = 32
    grid_M: int = 1024
    state: Union[AmplitudeState, MixedState] = field(
        default_factory=lambda: AmplitudeState.equal_superposition(1, 2)
    )
    observable: str = "x"
    time_start: float = 0.0
    time_stop: float = 10.0
    time_steps: int = 100
    t: float = 0.0
    anchor: str = "0"
    tol: float = 1e-10
    output_format: str = "csv"

    def __post_init__(self):
        if int(self.range_N) != self.range_N or self.range_N < 2:
            raise ConfigError("N must be an integer >= 2")
        if self.observable not in OBSERVABLES:
            raise ConfigError(f"observable must be one of {', '.join(OBSERVABLES)}")
        if int(self.time_steps) != self.time_steps or self.time_steps < 1:
            raise ConfigError("time.steps must be an integer >= 1")
        if not self.time_stop > self.time_start:
            raise ConfigError("time.stop must exceed time.start")
        if self.anchor not in ladder_solver.ANCHORS:
            raise ConfigError("anchor must be 0 or half")
        if not self.tol >= 0:
            raise ConfigError("tol must be non-negative")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")

    @property
    def range(self) -> IndexRange:
        return IndexRange.symmetric(self.range_N)

    @property
    def grid(self) -> AngularGrid:
        return AngularGrid(self.grid_M)

    def time_grid(self) -> np.ndarray:
        return np.linspace(self.time_start, self.time_stop, self.time_steps + 1)

    def check_state_margin(self):
        lo, hi = -self.range_N + STATE_MARGIN, self.range_N - STATE_MARGIN
        bad = [n for n in self.state.support if not lo <= n <= hi]
        if bad:
            raise ConfigError(
                f"state labels {bad} lie within {STATE_MARGIN} of the window edge "
                f"[-{self.range_N}, {self.range_N}]; increase N"
            )

    def meta(self) -> dict:
        p = self.params
        return {
            "hbar": p.hbar, "mass": p.mass_mu, "radius": p.radius_r,
            "N": self.range_N, "M": self.grid_M, "tol": self.tol, "anchor": self.anchor,
        }


# -- config ingestion -----------------------------------------------------

def _read_config_file(path: str) -> dict:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                data[key] = json.loads(value)
            except json.JSONDecodeError:
                data[key] = value
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _parse_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("complex amplitudes are written [re, im]")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def _parse_state(spec):
    if spec is None:
        return AmplitudeState.equal_superposition(1, 2)
    if not isinstance(spec, dict):
        raise ConfigError("state must be an object with 'amplitudes' or 'mixed'")
    if "mixed" in spec:
        return MixedState({int(n): float(p) for n, p in spec["mixed"].items()})
    if "amplitudes" in spec:
        amps = {int(n): _parse_complex(c) for n, c in spec["amplitudes"].items()}
        if spec.get("normalize", True):
            return AmplitudeState.normalized(amps)
        return AmplitudeState(amps)
    raise ConfigError("state must contain 'amplitudes' or 'mixed'")


def build_config(args: argparse.Namespace) -> ScenarioConfig:
    raw = _read_config_file(args.config) if args.config else {}
    overrides = {
        "N": args.N, "M": args.M, "tol": args.tol, "anchor": args.anchor, "format": args.format,
        "observable": getattr(args, "observable", None), "t": getattr(args, "t", None),
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    known = {"hbar", "mass", "radius", "N", "M", "state", "observable", "time", "t",
             "anchor", "tol", "format"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    time = raw.get("time", {})
    anchor = str(raw.get("anchor", "0"))
    try:
        return ScenarioConfig(
            params=PhysicalParams(float(raw.get("hbar", 1.0)), float(raw.get("mass", 1.0)),
                                  float(raw.get("radius", 1.0))),
            range_N=raw.get("N", 32),
            grid_M=raw.get("M", 1024),
            state=_parse_state(raw.get("state")),
            observable=raw.get("observable", "x"),
            time_start=float(time.get("start", 0.0)),
            time_stop=float(time.get("stop", 10.0)),
            time_steps=time.get("steps", 100),
            t=float(raw.get("t", 0.0)),
            anchor="0" if anchor in ("0", "0.0") else anchor,
            tol=float(raw.get("tol", 1e-10)),
            output_format=raw.get("format", "csv"),
        )
    except (StateError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


# -- output ---------------------------------------------------------------

def fmt(value) -> str:
    """15 significant digits, no negative zero, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    if v == 0:
        v = 0.0
    return format(v, ".15g")


def _json_value(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    v = float(fmt(value))
    return v if math.isfinite(v) else None


@dataclass
class Report:
    command: str
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    exit_code: int = EXIT_PASS


def render(report: Report, cfg: ScenarioConfig, fmt_name: str) -> str:
    meta = {"command": report.command, "params": cfg.meta(),
            "versions": {"matmech": matmech.__version__, "numpy": np.__version__}}
    if fmt_name == "json":
        doc = {
            "meta": _json_value(meta),
            "rows": [{c: _json_value(v) for c, v in zip(report.columns, row)} for row in report.rows],
            "summary": _json_value(report.summary),
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    p = cfg.meta()
    buf.write("# " + " ".join(f"{k}={fmt(v)}" for k, v in p.items()) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([fmt(v) for v in row])
    for k, v in report.summary.items():
        buf.write(f"# {k}={fmt(v)}\n")
    return buf.getvalue()


# -- observables ----------------------------------------------------------

def build_observable(name: str, params: PhysicalParams, rng: IndexRange):
    if name in ("x", "y"):
        return rotor_model.build_xy(params, rng)._asdict()[name]
    if name in ("p_x", "p_y"):
        return rotor_model.build_momenta(params, rng)._asdict()[name]
    if name in ("sin_phi", "cos_phi"):
        return rotor_model.build_trig(rng)._asdict()[name]
    if name == "L":
        return rotor_model.build_L(params, rng)
    if name == "H":
        return rotor_model.build_H(params, rng)
    raise ConfigError(f"unknown observable {name!r}")


# -- commands -------------------------------------------------------------

def cmd_spectrum(cfg: ScenarioConfig) -> Report:
    p = cfg.params
    table = rotor_model.spectrum(p, cfg.range)
    rows = []
    for n, e in table:
        e_next = rotor_model.level_energy(float(n + 1), p)
        rows.append([n, e, (e_next - e) / p.hbar])
    return Report("spectrum", ["n", "E_n", "omega_next"], rows)


def cmd_solve(cfg: ScenarioConfig) -> Report:
    p = cfg.params
    sol = ladder_solver.solve_ladder(p, cfg.range, cfg.anchor)
    res = ladder_solver.verify_solution(sol, p)
    rows = []
    labels = cfg.range.labels
    for i, n in enumerate(labels):
        if i < len(sol.s_plus):
            s, c = sol.s_plus[i], sol.c_plus[i]
            rows.append([int(n), sol.l_diag[i], s.real, s.imag, c.real, c.imag])
        else:
            rows.append([int(n), sol.l_diag[i], None, None, None, None])
    summary = {f"residual_{k}": v for k, v in res.as_dict().items()}
    summary["max_residual"] = res.max_residual
    ok = res.max_residual <= cfg.tol
    summary["status"] = "PASS" if ok else "FAIL"
    return Report("solve", ["n", "L_over_hbar", "sin_re", "sin_im", "cos_re", "cos_im"],
                  rows, summary, EXIT_PASS if ok else EXIT_FAIL)


def identity_suite(params: PhysicalParams, rng: IndexRange, margin: int = 2) -> list:
    """(name, form, residual, counted) for every checked operator identity.

    ``counted`` is False for the two literal claims about ``[x, p_x]`` and
    ``[p_x, p_y]`` that do not hold; they are listed next to the exact forms.
    """
    hb = params.hbar
    ih = 1j * hb
    one = identity(rng)
    L = rotor_model.build_L(params, rng)
    H = rotor_model.build_H(params, rng)
    sin_phi, cos_phi = rotor_model.build_trig(rng)
    x, y = rotor_model.build_xy(params, rng)
    p_x, p_y = rotor_model.build_momenta(params, rng)
    freqs = rotor_model.bohr_frequencies(params, rng)

    def inner(op):
        return interior_view(op, margin).max_abs()

    def herm(op):
        return (op - adjoint(op)).max_abs()

    sel = rotor_model.selection_rule_check(x, freqs)
    sel_y = rotor_model.selection_rule_check(y, freqs)
    return [
        ("[L,sin_phi] = -i hbar cos_phi", "exact", inner(commutator(L, sin_phi) + cos_phi * ih), True),
        ("[L,cos_phi] = i hbar sin_phi", "exact", inner(commutator(L, cos_phi) - sin_phi * ih), True),
        ("sin_phi^2 + cos_phi^2 = 1", "exact",
         inner(multiply(sin_phi, sin_phi) + multiply(cos_phi, cos_phi) - one), True),
        ("[x,y] = 0", "exact", inner(commutator(x, y)), True),
        ("[x,p_x] + [y,p_y] = i hbar 1", "exact",
         inner(commutator(x, p_x) + commutator(y, p_y) - one * ih), True),
        ("[x,p_x] = i hbar sin_phi^2", "exact",
         inner(commutator(x, p_x) - multiply(sin_phi, sin_phi) * ih), True),
        ("[y,p_y] = i hbar cos_phi^2", "exact",
         inner(commutator(y, p_y) - multiply(cos_phi, cos_phi) * ih), True),
        ("[p_x,p_y] = -i (hbar/r^2) L", "exact",
         inner(commutator(p_x, p_y) + L * (ih / params.radius_r**2)), True),
        ("L = x p_y - y p_x", "exact", inner(rotor_model.build_L_from_xy(params, rng) - L), True),
        ("H = L^2 / 2I", "exact", (multiply(L, L) / (2 * params.inertia_I) - H).max_abs(), True),
        ("x, y, p_x, p_y hermitian", "exact", max(herm(x), herm(y), herm(p_x), herm(p_y)), True),
        ("selection rule |n-m| = 1 for x, y", "exact",
         float(len(sel.violations) + len(sel_y.violations)), True),
        ("[x,p_x] = i hbar 1", "naive", inner(commutator(x, p_x) - one * ih), False),
        ("[y,p_y] = i hbar 1", "naive", inner(commutator(y, p_y) - one * ih), False),
        ("[p_x,p_y] = 0", "naive", inner(commutator(p_x, p_y)), False),
    ]


def cmd_verify(cfg: ScenarioConfig) -> Report:
    rows = []
    ok = True
    for name, form, residual, counted in identity_suite(cfg.params, cfg.range):
        passed = residual <= cfg.tol
        if counted:
            ok = ok and passed
        rows.append([name, form, residual, "PASS" if passed else "FAIL"])
    summary = {"status": "PASS" if ok else "FAIL",
               "note": "naive rows are reported, not counted toward the exit code"}
    return Report("verify", ["identity", "form", "max_residual", "status"], rows, summary,
                  EXIT_PASS if ok else EXIT_FAIL)


def _oracle_values(cfg: ScenarioConfig, times) -> np.ndarray:
    p, grid = cfg.params, cfg.grid
    if isinstance(cfg.state, MixedState):
        total = np.zeros(len(times), dtype=np.complex128)
        for n, w in cfg.state.weights.items():
            traj = grid_evolve_expectation(AmplitudeState({n: 1.0}), cfg.observable, p, grid, times)
            total += w * traj.values
        return total
    return grid_evolve_expectation(cfg.state, cfg.observable, p, grid, times).values


def cmd_evolve(cfg: ScenarioConfig, oracle: bool = False) -> Report:
    cfg.check_state_margin()
    p, rng = cfg.params, cfg.range
    op = build_observable(cfg.observable, p, rng)
    freqs = rotor_model.bohr_frequencies(p, rng)
    times = cfg.time_grid()
    traj = expectation_series(cfg.state, op, freqs, times, name=cfg.observable)
    columns = ["t", "re", "im"]
    summary = {"observable": cfg.observable}
    code = EXIT_PASS
    if oracle:
        ref = _oracle_values(cfg, times)
        columns += ["oracle_re", "oracle_im"]
        rows = [[t, v.real, v.imag, o.real, o.imag] for t, v, o in zip(times, traj.values, ref)]
        dev = float(np.max(np.abs(traj.values - ref)))
        summary["max_oracle_deviation"] = dev
        ok = dev <= cfg.tol
        summary["status"] = "PASS" if ok else "FAIL"
        code = EXIT_PASS if ok else EXIT_FAIL
    else:
        rows = [[t, v.real, v.imag] for t, v in zip(times, traj.values)]
    return Report("evolve", columns, rows, summary, code)


def cmd_elements(cfg: ScenarioConfig) -> Report:
    p, rng = cfg.params, cfg.range
    op = build_observable(cfg.observable, p, rng)
    op = evolve_operator(op, rotor_model.bohr_frequencies(p, rng), cfg.t)
    rows = []
    for k, entries in op.bands.items():
        for n, v in zip(rng.row_labels(k), entries):
            if v != 0:
                rows.append([int(n), int(n + k), v.real, v.imag])
    rows.sort(key=lambda r: (r[0], r[1]))
    return Report("elements", ["n", "m", "re", "im"], rows,
                  {"observable": cfg.observable, "t": cfg.t})


# -- entry point ----------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON or key = value config file")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-10)")
    common.add_argument("--anchor", choices=ladder_solver.ANCHORS, default=None)
    common.add_argument("--N", type=int, default=None, help="ladder window [-N, N] (default 32)")
    common.add_argument("--M", type=int, default=None, help="oracle grid points (default 1024)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="matmech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=matmech.__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="energies and neighbour frequencies")
    sub.add_parser("solve", parents=[common], help="derive L and trig elements from commutators")
    sub.add_parser("verify", parents=[common], help="operator identity residuals")
    ev = sub.add_parser("evolve", parents=[common], help="expectation trajectory")
    ev.add_argument("--oracle", action="store_true", help="add Schrodinger-picture columns")
    ev.add_argument("--observable", choices=OBSERVABLES, default=None)
    el = sub.add_parser("elements", parents=[common], help="nonzero matrix elements at time t")
    el.add_argument("--observable", choices=OBSERVABLES, default=None)
    el.add_argument("--t", type=float, default=None)
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "evolve": cmd_evolve,
    "elements": cmd_elements,
}


def main(argv: Optional[list] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        cfg = build_config(args)
        if args.command == "evolve":
            report = cmd_evolve(cfg, oracle=args.oracle)
        else:
            report = COMMANDS[args.command](cfg)
    except (ConfigError, OSError, GridError, ladder_solver.LadderSolverError, IndexError) as exc:
        print(f"matmech: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, cfg, cfg.output_format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
