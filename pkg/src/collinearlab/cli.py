"""Command-line front end: scenario runs, configuration solving, reports.

Subcommands:

    simulate   build a scenario, integrate it, write trajectory and
               diagnostics CSV (and optionally figures)
    cc         solve collinear central configurations, or enumerate all
               orderings with --all
    verify     run a scenario and the verification matching its kind
    geometry   counting functions, level-set intersection, tangency

Scenarios are described by a JSON config document (see README for the
schema) whose values individual flags override.  Exit codes: 0 success,
1 invalid configuration or arguments, 2 close-approach abort, 3 solver
failure, 4 verification hypothesis violation.  All floating-point output
is printed with 17 significant digits so identical inputs give identical
bytes.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import central_config, dynamics, geometry, scenarios, verify
from .model import MassSystem, PhaseState, PotentialSpec

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CLOSE_APPROACH = 2
EXIT_SOLVER = 3
EXIT_HYPOTHESIS = 4

SCHEMA_VERSION = 1

KINDS = ("relative_equilibrium", "homographic", "non_central_control", "figure_eight", "custom")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on syntax errors; 2 is reserved for close approaches
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- parsing


def _parse_floats(text: str, field: str):
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise ConfigError(f"field '{field}': not a comma-separated number list: {text!r}") from exc


def _parse_ints(text: str, field: str):
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise ConfigError(f"field '{field}': not a comma-separated integer list: {text!r}") from exc


def _potential_from_args(args) -> PotentialSpec | None:
    terms = []
    if getattr(args, "newtonian", False):
        terms.append((-1.0, getattr(args, "G", 1.0)))
    if getattr(args, "alpha", None) is not None or getattr(args, "coeff", None) is not None:
        if args.alpha is None or args.coeff is None:
            raise ConfigError("field 'potential': --alpha and --coeff must be given together")
        terms.append((args.alpha, args.coeff))
    for spec in getattr(args, "term", None) or []:
        try:
            alpha, coeff = (float(p) for p in spec.split(":"))
        except ValueError as exc:
            raise ConfigError(f"field 'potential': bad --term {spec!r}, want ALPHA:COEFF") from exc
        terms.append((alpha, coeff))
    if not terms:
        return None
    try:
        return PotentialSpec(terms)
    except ValueError as exc:
        raise ConfigError(f"field 'potential': {exc}") from exc


def _potential_from_config(node) -> PotentialSpec:
    try:
        if isinstance(node, dict) and "newtonian" in node:
            return PotentialSpec.newtonian(float(node["newtonian"].get("G", 1.0)))
        if isinstance(node, dict) and "terms" in node:
            return PotentialSpec([(float(a), float(c)) for a, c in node["terms"]])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"field 'potential': {exc}") from exc
    raise ConfigError("field 'potential': need {'newtonian': {...}} or {'terms': [[alpha, coeff], ...]}")


def _normalization_from_text(text: str):
    if ":" in text:
        kind, value = text.split(":", 1)
        try:
            return (kind, float(value))
        except ValueError as exc:
            raise ConfigError(f"field 'normalization': bad value in {text!r}") from exc
    return (text, 1.0)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"field 'config': cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"field 'config': {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("field 'config': top level must be an object")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"field 'schema_version': unsupported version {version}")
    return cfg


def _merged_scenario_config(args) -> dict:
    """Config document with command-line overrides folded in."""
    cfg = _load_config(args.config) if args.config else {}
    cfg.setdefault("scenario", {})
    cfg.setdefault("integrator", {})
    cfg.setdefault("output", {})

    if args.masses:
        cfg["masses"] = _parse_floats(args.masses, "masses")
    pot = _potential_from_args(args)
    if pot is not None:
        cfg["potential"] = {"terms": [[a, c] for a, c in pot.terms]}
    sc = cfg["scenario"]
    for flag, key in [
        ("kind", "kind"),
        ("omega0", "omega0"),
        ("dilation_rate", "dilation_rate"),
        ("t_end", "t_end"),
        ("periods", "periods"),
        ("gap_perturbation", "gap_perturbation"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            sc[key] = value
    if getattr(args, "ordering", None):
        sc["ordering"] = _parse_ints(args.ordering, "scenario.ordering")
    if getattr(args, "gaps", None):
        sc["gaps"] = _parse_floats(args.gaps, "scenario.gaps")
    if getattr(args, "normalization", None):
        sc["normalization"] = list(_normalization_from_text(args.normalization))
    it = cfg["integrator"]
    for flag, key in [
        ("rel_tol", "rel_tol"),
        ("abs_tol", "abs_tol"),
        ("max_step", "max_step"),
        ("min_separation", "min_separation"),
        ("sample_interval", "sample_interval"),
        ("scheme", "scheme"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            it[key] = value
    out = cfg["output"]
    for flag, key in [
        ("trajectory_csv", "trajectory_csv"),
        ("diagnostics_csv", "diagnostics_csv"),
        ("report_json", "report_json"),
        ("figures", "figures_dir"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = value
    return cfg


# ---------------------------------------------------------------- scenario


class Scenario:
    """A validated, buildable scenario: state, masses, potential, horizon."""

    def __init__(self, kind, state, masses, pot, t_end, integrator_config, output):
        self.kind = kind
        self.state = state
        self.masses = masses
        self.pot = pot
        self.t_end = t_end
        self.integrator_config = integrator_config
        self.output = output

    def integrate(self) -> dynamics.Trajectory:
        return dynamics.integrate(self.state, self.masses, self.pot, self.t_end, self.integrator_config)


def _integrator_from_config(node) -> dynamics.IntegratorConfig:
    known = {"rel_tol", "abs_tol", "max_step", "min_separation", "sample_interval", "scheme"}
    for key in node:
        if key not in known:
            raise ConfigError(f"field 'integrator.{key}': unknown key")
    kwargs = {}
    for key in known:
        if key in node and node[key] is not None:
            kwargs[key] = node[key]
    if "max_step" in kwargs:
        kwargs["max_step"] = float(kwargs["max_step"])
    try:
        return dynamics.IntegratorConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"field 'integrator': {exc}") from exc


def build_scenario(cfg: dict) -> Scenario:
    sc = cfg.get("scenario", {})
    kind = sc.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"field 'scenario.kind': must be one of {', '.join(KINDS)}; got {kind!r}")

    if kind == "figure_eight":
        state, masses = scenarios.figure_eight_ics()
        pot = PotentialSpec.newtonian()
        natural_period = scenarios.FIGURE_EIGHT_PERIOD
    else:
        if "masses" not in cfg:
            raise ConfigError("field 'masses': required")
        try:
            masses = MassSystem(cfg["masses"])
        except ValueError as exc:
            raise ConfigError(f"field 'masses': {exc}") from exc
        if "potential" not in cfg:
            raise ConfigError("field 'potential': required")
        pot = _potential_from_config(cfg["potential"])
        state, natural_period = _build_state(kind, sc, masses, pot)

    t_end = _horizon(sc, natural_period)
    integ = _integrator_from_config(cfg.get("integrator", {}))
    return Scenario(kind, state, masses, pot, t_end, integ, cfg.get("output", {}))


def _ordering_of(sc, masses):
    ordering = sc.get("ordering", list(range(masses.n)))
    if sorted(ordering) != list(range(masses.n)):
        raise ConfigError(f"field 'scenario.ordering': must be a permutation of 0..{masses.n - 1}")
    return tuple(int(i) for i in ordering)


def _build_state(kind, sc, masses, pot):
    ordering = _ordering_of(sc, masses)
    normalization = tuple(sc.get("normalization", ("first_gap", 1.0)))

    if kind in ("relative_equilibrium", "homographic"):
        cc = central_config.solve_collinear(masses, ordering, pot, normalization)
        if kind == "relative_equilibrium":
            state = scenarios.relative_equilibrium_ics(cc, masses)
            return state, 2.0 * math.pi / math.sqrt(2.0 * cc.lam)
        if "omega0" not in sc:
            raise ConfigError("field 'scenario.omega0': required for homographic scenarios")
        omega0 = float(sc["omega0"])
        dil = float(sc.get("dilation_rate", 0.0))
        state = scenarios.homographic_ics(cc, masses, omega0, dil)
        inverse_distance = pot.is_homogeneous and pot.terms[0][0] == -1.0
        try:
            period = scenarios.radial_period(cc, omega0, dil) if inverse_distance else None
        except ValueError:
            period = None
        return state, period

    if kind == "non_central_control":
        if "omega0" not in sc:
            raise ConfigError("field 'scenario.omega0': required for control scenarios")
        omega0 = float(sc["omega0"])
        if "gaps" in sc:
            gaps = np.asarray(sc["gaps"], dtype=float)
        elif "gap_perturbation" in sc:
            cc = central_config.solve_collinear(masses, ordering, pot, normalization)
            gaps = cc.gaps.copy()
            gaps[0] *= 1.0 + float(sc["gap_perturbation"])
        else:
            raise ConfigError("field 'scenario.gaps': control scenarios need gaps or gap_perturbation")
        try:
            state = scenarios.non_central_collinear_ics(masses, gaps, omega0, pot, ordering)
        except ValueError as exc:
            raise ConfigError(f"field 'scenario.gaps': {exc}") from exc
        return state, 2.0 * math.pi / abs(omega0)

    # custom
    if "positions" not in sc or "velocities" not in sc:
        raise ConfigError("field 'scenario.positions': custom scenarios need positions and velocities")
    try:
        state = PhaseState(sc["positions"], sc["velocities"], masses)
    except ValueError as exc:
        raise ConfigError(f"field 'scenario.positions': {exc}") from exc
    return state, None


def _horizon(sc, natural_period):
    if "t_end" in sc and "periods" in sc:
        raise ConfigError("field 'scenario.t_end': give either t_end or periods, not both")
    if "t_end" in sc:
        t_end = float(sc["t_end"])
        if t_end <= 0:
            raise ConfigError("field 'scenario.t_end': must be positive")
        return t_end
    if "periods" in sc:
        if natural_period is None:
            raise ConfigError("field 'scenario.periods': this scenario has no natural period; give t_end")
        periods = float(sc["periods"])
        if periods <= 0:
            raise ConfigError("field 'scenario.periods': must be positive")
        return periods * natural_period
    raise ConfigError("field 'scenario.t_end': required (or give periods)")


# ---------------------------------------------------------------- output


def write_trajectory_csv(path, traj: dynamics.Trajectory) -> None:
    n = traj.initial.n
    header = ["t"]
    for i in range(1, n + 1):
        header += [f"x{i}", f"y{i}", f"vx{i}", f"vy{i}"]
    lines = [",".join(header)]
    for t, state in zip(traj.times, traj.states):
        row = [_fmt(t)]
        for i in range(n):
            row += [
                _fmt(state.positions[i, 0]),
                _fmt(state.positions[i, 1]),
                _fmt(state.velocities[i, 0]),
                _fmt(state.velocities[i, 1]),
            ]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_diagnostics_csv(path, series: dynamics.DiagnosticSeries) -> None:
    n = series.K_body.shape[1]
    header = ["t", "U", "T", "H", "I", "K", "J", "sundman_gap", "collinearity", "omega"]
    header += [f"K_{i}" for i in range(1, n + 1)]
    lines = [",".join(header)]
    for k in range(len(series)):
        row = [
            _fmt(series.times[k]),
            _fmt(series.U[k]),
            _fmt(series.T[k]),
            _fmt(series.H[k]),
            _fmt(series.I[k]),
            _fmt(series.K[k]),
            _fmt(series.J[k]),
            _fmt(series.sundman_gap[k]),
            _fmt(series.collinearity[k]),
            _fmt(series.omega[k]),
        ]
        row += [_fmt(series.K_body[k, i]) for i in range(n)]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def _render_run_figures(figures_dir, traj, series) -> None:
    from . import plots

    directory = Path(figures_dir)
    directory.mkdir(parents=True, exist_ok=True)
    plots.trajectory_figure(traj, directory / "trajectory.png")
    plots.diagnostics_figure(series, directory / "diagnostics.png")


# ---------------------------------------------------------------- commands


def _cmd_simulate(args) -> int:
    cfg = _merged_scenario_config(args)
    scenario = build_scenario(cfg)
    try:
        traj = scenario.integrate()
    except dynamics.ClosePassageError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_CLOSE_APPROACH
    series = dynamics.diagnostics_series(traj, scenario.masses, scenario.pot)

    out = scenario.output
    write_trajectory_csv(out.get("trajectory_csv", "trajectory.csv"), traj)
    write_diagnostics_csv(out.get("diagnostics_csv", "diagnostics.csv"), series)
    if out.get("figures_dir"):
        _render_run_figures(out["figures_dir"], traj, series)
    print(
        f"simulated {scenario.kind} to t={_fmt(traj.times[-1])}: "
        f"{len(traj)} samples, {traj.stats.steps} steps "
        f"({traj.stats.rejected} rejected), "
        f"max energy drift {_fmt(traj.stats.max_energy_drift)}"
    )
    return EXIT_OK


def _verification_for(scenario: Scenario, traj, tolerances) -> verify.VerificationReport:
    if scenario.kind in ("relative_equilibrium", "homographic", "non_central_control"):
        report = verify.verify_collinear_homographic(traj, scenario.masses, scenario.pot, tolerances)
        if scenario.kind == "relative_equilibrium":
            extra = verify.verify_constant_inertia(traj, scenario.masses, tolerances)
            report = verify.VerificationReport(
                checks=report.checks + extra.checks,
                passed=report.passed and extra.passed,
                hypothesis_met=extra.hypothesis_met,
                notes=report.notes + extra.notes,
                info=report.info + extra.info,
            )
        return report
    return verify.verify_generic(traj, scenario.masses, scenario.pot, tolerances)


def _cmd_verify(args) -> int:
    cfg = _merged_scenario_config(args)
    scenario = build_scenario(cfg)
    try:
        traj = scenario.integrate()
    except dynamics.ClosePassageError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_CLOSE_APPROACH

    tolerances = verify.Tolerances()
    report = _verification_for(scenario, traj, tolerances)

    control = scenario.kind == "non_central_control"
    if control:
        # control semantics: the run is SUPPOSED to leave the line
        breakdown = report.entry("collinearity").deviation
        broke = breakdown >= tolerances.control
        verdict = broke
        print(report.format_text())
        print(
            f"# control collinearity_breakdown {_fmt(breakdown)} "
            f"{_fmt(tolerances.control)} {'OBSERVED' if broke else 'NOT-OBSERVED'}"
        )
    else:
        verdict = report.passed
        print(report.format_text())

    out = scenario.output
    if out.get("report_json") or getattr(args, "report_json", None):
        payload = report.to_dict()
        payload["scenario_kind"] = scenario.kind
        if control:
            payload["control_breakdown_observed"] = bool(verdict)
        Path(out.get("report_json") or args.report_json).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
    if out.get("figures_dir"):
        series = dynamics.diagnostics_series(traj, scenario.masses, scenario.pot)
        _render_run_figures(out["figures_dir"], traj, series)
    return EXIT_OK if verdict else EXIT_CONFIG


def _cc_rows(args):
    if not args.masses:
        raise ConfigError("field 'masses': required")
    masses = MassSystem(_parse_floats(args.masses, "masses"))
    pot = _potential_from_args(args)
    if pot is None:
        raise ConfigError("field 'potential': give --newtonian, --alpha/--coeff, or --term")
    normalization = _normalization_from_text(args.normalization or "first_gap")
    if args.all:
        configs = central_config.enumerate_collinear(masses, pot, normalization)
    else:
        ordering = tuple(_parse_ints(args.ordering, "ordering")) if args.ordering else tuple(range(masses.n))
        configs = [central_config.solve_collinear(masses, ordering, pot, normalization)]
    return masses, pot, configs


def _cmd_cc(args) -> int:
    _, _, configs = _cc_rows(args)
    if args.json:
        payload = [
            {
                "ordering": list(c.ordering),
                "gaps": [float(g) for g in c.gaps],
                "lambda": c.lam,
                "residual": c.residual_norm,
                "extra_roots": len(c.extra_roots),
            }
            for c in configs
        ]
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for c in configs:
            gaps = ",".join(_fmt(g) for g in c.gaps)
            line = (
                f"ordering={','.join(str(i) for i in c.ordering)} "
                f"gaps={gaps} lambda={_fmt(c.lam)} residual={_fmt(c.residual_norm)}"
            )
            if c.extra_roots:
                line += f" extra_roots={len(c.extra_roots)}"
            print(line)
    return EXIT_OK


def _cmd_geometry(args) -> int:
    if args.geometry_command == "count":
        if args.n is None:
            raise ConfigError("field 'n': required")
        try:
            m = geometry.count_distances(args.n)
            r = geometry.count_relations(args.n)
        except ValueError as exc:
            raise ConfigError(f"field 'n': {exc}") from exc
        print(f"M={m} R={r}")
        return EXIT_OK

    if not args.masses:
        raise ConfigError("field 'masses': required")
    masses = MassSystem(_parse_floats(args.masses, "masses"))
    pot = _potential_from_args(args)
    if pot is None:
        raise ConfigError("field 'potential': give --newtonian, --alpha/--coeff, or --term")

    if args.geometry_command == "intersect":
        ordering = tuple(_parse_ints(args.ordering, "ordering")) if args.ordering else (0, 1, 2)
        result = geometry.intersect_levels(
            args.cU, args.cI, masses, pot, ordering, resolution=args.resolution
        )
        _print_intersection(ordering, result, args)
        if args.dump:
            rows = geometry.level_curve_points(args.cI, masses, pot, ordering, resolution=args.resolution)
            text = "\n".join(" ".join(_fmt(v) for v in row) for row in rows)
            Path(args.dump).write_text(text + "\n")
        if args.figures:
            from . import plots

            Path(args.figures).mkdir(parents=True, exist_ok=True)
            plots.levelset_figure(
                masses, pot, ordering, args.cU, args.cI, result,
                Path(args.figures) / "levelsets.png",
            )
        return EXIT_OK

    # tangency
    if args.all:
        orderings = [p for p in itertools.permutations(range(masses.n)) if p[0] < p[-1]]
    else:
        orderings = [tuple(_parse_ints(args.ordering, "ordering")) if args.ordering else tuple(range(masses.n))]
    payloads = []
    for ordering in orderings:
        cc = central_config.solve_collinear(masses, ordering, pot)
        result = geometry.tangency_at_cc(cc, masses, pot, resolution=args.resolution)
        payloads.append((ordering, cc, result))
        if args.figures:
            from . import plots

            c_U, c_I = geometry.level_values(
                float(cc.gaps[0]), float(cc.gaps[1]), masses, pot, ordering
            )
            Path(args.figures).mkdir(parents=True, exist_ok=True)
            name = "tangency_" + "".join(str(i) for i in ordering) + ".png"
            plots.levelset_figure(masses, pot, ordering, c_U, c_I, result, Path(args.figures) / name)
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "ordering": list(o),
                        "count": res.count,
                        "tangent": res.tangency_flag,
                        "points": [[a, b] for a, b in res.points],
                        "gradient_angles": list(res.gradient_angle_at_points),
                    }
                    for o, _, res in payloads
                ],
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for o, _, res in payloads:
            pts = " ".join(f"({_fmt(a)},{_fmt(b)})" for a, b in res.points)
            print(
                f"ordering={','.join(str(i) for i in o)} count={res.count} "
                f"tangent={'true' if res.tangency_flag else 'false'} {pts}".rstrip()
            )
    return EXIT_OK


def _print_intersection(ordering, result, args) -> None:
    if args.json:
        print(
            json.dumps(
                {
                    "ordering": list(ordering),
                    "count": result.count,
                    "tangent": result.tangency_flag,
                    "points": [[a, b] for a, b in result.points],
                    "gradient_angles": list(result.gradient_angle_at_points),
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        pts = " ".join(f"({_fmt(a)},{_fmt(b)})" for a, b in result.points)
        print(
            f"count={result.count} tangent={'true' if result.tangency_flag else 'false'} {pts}".rstrip()
        )


# ---------------------------------------------------------------- parser


def _add_potential_flags(parser):
    parser.add_argument("--newtonian", action="store_true", help="inverse-distance attraction")
    parser.add_argument("--G", type=float, default=1.0, help="gravitational constant for --newtonian")
    parser.add_argument("--alpha", type=float, help="exponent of a single power-law term")
    parser.add_argument("--coeff", type=float, help="coefficient of the single term")
    parser.add_argument(
        "--term", action="append", metavar="ALPHA:COEFF", help="add a power-law term (repeatable)"
    )


def _add_scenario_flags(parser):
    parser.add_argument("--config", help="JSON scenario configuration file")
    parser.add_argument("--masses", help="comma-separated masses")
    _add_potential_flags(parser)
    parser.add_argument("--kind", choices=KINDS, help="scenario kind")
    parser.add_argument("--ordering", help="comma-separated body ordering on the line")
    parser.add_argument("--normalization", help="first_gap[:VALUE] or inertia[:VALUE]")
    parser.add_argument("--omega0", type=float, help="initial rotation rate")
    parser.add_argument("--dilation-rate", dest="dilation_rate", type=float, help="initial dilation rate")
    parser.add_argument("--gaps", help="explicit gaps for control scenarios")
    parser.add_argument(
        "--gap-perturbation", dest="gap_perturbation", type=float,
        help="perturb the solved first gap by this relative amount (control scenarios)",
    )
    parser.add_argument("--t-end", dest="t_end", type=float, help="integration horizon")
    parser.add_argument("--periods", type=float, help="horizon in natural periods of the scenario")
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, help="integrator relative tolerance")
    parser.add_argument("--abs-tol", dest="abs_tol", type=float, help="integrator absolute tolerance")
    parser.add_argument("--max-step", dest="max_step", type=float, help="maximum step size")
    parser.add_argument("--min-separation", dest="min_separation", type=float, help="close-approach guard")
    parser.add_argument("--sample-interval", dest="sample_interval", type=float, help="output sample spacing")
    parser.add_argument("--scheme", choices=("rkf78", "verlet"), help="integration scheme")
    parser.add_argument("--trajectory-csv", dest="trajectory_csv", help="trajectory output path")
    parser.add_argument("--diagnostics-csv", dest="diagnostics_csv", help="diagnostics output path")
    parser.add_argument("--report-json", dest="report_json", help="verification report JSON path")
    parser.add_argument("--figures", help="directory for rendered figures")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collinearlab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a scenario and write CSV outputs")
    _add_scenario_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_cc = sub.add_parser("cc", help="solve collinear central configurations")
    p_cc.add_argument("--masses", help="comma-separated masses")
    _add_potential_flags(p_cc)
    p_cc.add_argument("--ordering", help="comma-separated body ordering")
    p_cc.add_argument("--normalization", help="first_gap[:VALUE] or inertia[:VALUE]")
    p_cc.add_argument("--all", action="store_true", help="enumerate all orderings (n!/2)")
    p_cc.add_argument("--json", action="store_true", help="machine-readable output")
    p_cc.set_defaults(func=_cmd_cc)

    p_ver = sub.add_parser("verify", help="run a scenario and its matching verification")
    _add_scenario_flags(p_ver)
    p_ver.set_defaults(func=_cmd_verify)

    p_geo = sub.add_parser("geometry", help="counting and level-set analysis")
    geo_sub = p_geo.add_subparsers(dest="geometry_command", required=True)

    p_count = geo_sub.add_parser("count", help="mutual distances and collinearity relations")
    p_count.add_argument("--n", type=int, help="number of bodies")
    p_count.set_defaults(func=_cmd_geometry)

    p_int = geo_sub.add_parser("intersect", help="intersect U and I level sets on an ordering plane")
    p_int.add_argument("--cU", type=float, required=True, help="potential level")
    p_int.add_argument("--cI", type=float, required=True, help="moment-of-inertia level")
    p_int.add_argument("--masses", help="comma-separated masses (three bodies)")
    _add_potential_flags(p_int)
    p_int.add_argument("--ordering", help="slot ordering, default 0,1,2")
    p_int.add_argument("--resolution", type=int, default=256)
    p_int.add_argument("--dump", help="write curve rows 'a b U I' to this path")
    p_int.add_argument("--json", action="store_true")
    p_int.add_argument("--figures", help="directory for the level-set figure")
    p_int.set_defaults(func=_cmd_geometry)

    p_tan = geo_sub.add_parser("tangency", help="tangency of the level sets at the central configuration")
    p_tan.add_argument("--masses", help="comma-separated masses (three bodies)")
    _add_potential_flags(p_tan)
    p_tan.add_argument("--ordering", help="slot ordering, default 0,1,2")
    p_tan.add_argument("--all", action="store_true", help="all orderings")
    p_tan.add_argument("--resolution", type=int, default=256)
    p_tan.add_argument("--json", action="store_true")
    p_tan.add_argument("--figures", help="directory for the level-set figures")
    p_tan.set_defaults(func=_cmd_geometry)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except central_config.SolverFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except verify.HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except dynamics.StepUnderflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CLOSE_APPROACH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
