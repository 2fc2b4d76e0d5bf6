"""Command-line front end.

Every subcommand writes its data files and a ``manifest.json`` into ``--out``
and prints a fixed-layout report. Exit status: 0 on success, 1 when a
validation check fails, 2 on bad parameters (with a JSON error on stderr).
Angles are given in degrees on the command line and stored in radians.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, io
from .errors import JointMeasError
from .hilbert import Check, expectation, validate_density
from .phasespace import (
    FockDensity,
    PhaseSpaceGrid,
    deconvolution_gain,
    deconvolve_husimi,
    husimi,
    marginal_widths,
    prepare_state,
    quadrature_set,
    smear_wigner,
    squeezing_from_transparency,
    tomographic_reconstruct,
    wigner,
    wigner_values,
)
from .polarization import (
    TETRAHEDRON,
    FourPortConfig,
    PoincareDirection,
    TwoPortConfig,
    polar2_ideal_povms,
    polar2_nonideality,
    polar2_povm,
    polar4_nonideality,
    polar4_povm,
    polar4_target_povms,
)
from .povm import (
    check_nonideality,
    informational_completeness,
    invert_nonideality,
    joint_distribution,
    marginals,
    nonideality_fit,
    reconstruct_ideal_distribution,
    validate_povm,
    wigner_marginal_check,
    wigner_measure,
)


class UsageError(JointMeasError, ValueError):
    pass


@dataclass
class RunResult:
    command: str
    parameters: dict
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    residuals: dict[str, float] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def manifest(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "checks": [
                {"name": c.name, "violation": float(c.violation), "tol": c.tol, "passed": c.passed}
                for c in self.checks
            ],
            "passed": self.passed,
        }


def emit_report(result: RunResult) -> str:
    """Human-readable summary: status, extra lines, checks table, residuals."""
    out = [f"{result.command}: {'ok' if result.passed else 'FAILED'}"]
    out += result.lines
    if result.checks:
        width = max(len(c.name) for c in result.checks)
        out.append(f"{'check':<{width}}  {'violation':>12}  {'tol':>9}  status")
        for c in result.checks:
            status = "pass" if c.passed else "FAIL"
            out.append(f"{c.name:<{width}}  {c.violation:12.3e}  {c.tol:9.1e}  {status}")
    for k, v in result.residuals.items():
        out.append(f"{k} = {io.fmt(v)}")
    return "\n".join(out)


# -- argument helpers -------------------------------------------------------


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {text!r}")
    return vals


def _load_state(args) -> FockDensity:
    spec = args.state
    if spec is None:
        raise UsageError("--state is required")
    if spec.startswith("file:"):
        return FockDensity(io.operator_from_json(io.read_json(spec[5:])))
    return prepare_state(spec, cutoff=args.cutoff)


def _squeezing(args) -> float:
    if args.gamma is not None:
        return float(np.sqrt(squeezing_from_transparency(args.gamma)))
    return args.s


def _direction(theta, vec) -> PoincareDirection | None:
    if vec is not None:
        return PoincareDirection.normalized(_floats(vec, 3))
    if theta is not None:
        return PoincareDirection.linear_degrees(theta)
    return None


def _polar_config(args, four: bool):
    if args.config:
        cfg = io.polarization_config(io.read_json(args.config))
        if isinstance(cfg, FourPortConfig) != four:
            raise UsageError("config file describes the other setup")
        return cfg
    if four:
        dirs = [_direction(getattr(args, f"theta{i}"), getattr(args, f"dir{i}")) for i in range(1, 5)]
        if all(d is None for d in dirs):
            dirs = [PoincareDirection(n) for n in TETRAHEDRON]
        elif any(d is None for d in dirs):
            raise UsageError("give all four analyzer directions or none")
        return FourPortConfig(args.gamma1, args.gamma2, args.gamma3, tuple(dirs))
    d1 = _direction(args.theta1, args.dir1)
    d2 = _direction(args.theta2, args.dir2)
    if d1 is None or d2 is None or args.gamma is None:
        raise UsageError("polar2 needs --gamma and two analyzer directions (or --config)")
    return TwoPortConfig(args.gamma, d1, d2)


def _setup(cfg):
    """POVM, nonideality matrices and ideal POVMs of a polarization setup."""
    if isinstance(cfg, TwoPortConfig):
        m = polar2_povm(cfg)
        lam, mu = polar2_nonideality(cfg.gamma)
        q, p = polar2_ideal_povms(cfg)
    else:
        m = polar4_povm(cfg)
        lam, mu = polar4_nonideality(cfg.gamma2, cfg.gamma3)
        q, p = polar4_target_povms(cfg)
    return m, lam, mu, q, p


class Runner:
    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
        self.result = RunResult(args.command, params)

    def path(self, name: str) -> Path:
        p = self.out / name
        self.result.outputs.append(p.name)
        return p

    def json(self, name: str, obj) -> Path:
        return io.write_json(self.path(name), obj)

    def field(self, name: str, f) -> None:
        csv_path = self.path(name)
        _, side = io.write_field(csv_path, f)
        self.result.outputs.append(side.name)

    def input(self, path) -> str:
        self.result.inputs.append(str(path))
        return path


# -- subcommands ------------------------------------------------------------


def cmd_state(r: Runner):
    rho = _load_state(r.args)
    r.json("state.json", io.operator_to_json(rho.rho))
    r.result.checks += validate_density(rho.rho, r.args.tol).checks
    r.result.residuals.update(
        trace=float(np.trace(rho.rho).real),
        mean_photon_number=rho.mean_photon_number(),
        cutoff_population=float(rho.rho[-1, -1].real),
    )


def cmd_wigner(r: Runner):
    rho = _load_state(r.args)
    grid = PhaseSpaceGrid.parse(r.args.grid)
    w = wigner(rho, grid)
    r.field("wigner.csv", w)
    r.result.residuals.update(
        integral=float(w.integral()),
        minimum=float(w.values.min()),
        origin_value=float(wigner_values(rho, [0.0], [0.0])[0, 0]),
    )


def cmd_husimi(r: Runner):
    rho = _load_state(r.args)
    s = _squeezing(r.args)
    h = husimi(rho, s, PhaseSpaceGrid.parse(r.args.grid))
    r.field("husimi.csv", h)
    r.result.residuals.update(s=s, integral=float(h.integral()), minimum=float(h.values.min()))
    r.result.checks.append(Check("nonnegative", max(0.0, -float(h.values.min())), 1e-12))


def _input_field(r: Runner, make):
    if r.args.input:
        return io.read_field(r.input(r.args.input)), None
    rho = _load_state(r.args)
    return make(rho), rho


def cmd_smear(r: Runner):
    s = _squeezing(r.args)
    grid = PhaseSpaceGrid.parse(r.args.grid)
    w, rho = _input_field(r, lambda rho: wigner(rho, grid))
    out = smear_wigner(w, s)
    r.field("smeared.csv", out)
    r.result.residuals.update(s=s, integral_in=float(w.integral()), integral_out=float(out.integral()))
    if r.args.oracle and rho is not None:
        r.result.checks.append(Check("husimi_sup_error", out.sup_distance(husimi(rho, s, w.grid)), 1e-6))


def cmd_deconvolve(r: Runner):
    s = _squeezing(r.args)
    grid = PhaseSpaceGrid.parse(r.args.grid)
    p, rho = _input_field(r, lambda rho: husimi(rho, s, grid))
    out = deconvolve_husimi(p, s, r.args.k_max, taper=not r.args.no_taper, max_gain=r.args.max_gain)
    r.field("deconvolved.csv", out)
    r.result.residuals.update(s=s, k_max=r.args.k_max, max_gain=min(deconvolution_gain(s, r.args.k_max), r.args.max_gain))
    if r.args.oracle and rho is not None:
        ref = wigner(rho, p.grid)
        r.result.residuals.update(relative_l2_error=out.relative_l2(ref), sup_error=out.sup_distance(ref))


def _angles(args) -> np.ndarray:
    span = 2 * np.pi if args.full_circle else np.pi
    return span * np.arange(args.angles) / args.angles


def _x_grid(args) -> np.ndarray:
    lo, hi = _floats(args.x_range, 2)
    return np.linspace(lo, hi, args.points)


def cmd_quadratures(r: Runner):
    rho = _load_state(r.args)
    qs = quadrature_set(rho, _angles(r.args), _x_grid(r.args))
    io.write_quadratures(r.path("quadratures.csv"), qs)
    norms = np.trapezoid(qs.w, dx=qs.dx, axis=1)
    r.result.residuals.update(max_normalization_error=float(np.max(np.abs(norms - 1.0))))


def cmd_tomo(r: Runner):
    grid = PhaseSpaceGrid.parse(r.args.grid)
    rho = None
    if r.args.input:
        qs = io.read_quadratures(r.input(r.args.input))
    else:
        rho = _load_state(r.args)
        qs = quadrature_set(rho, _angles(r.args), _x_grid(r.args))
    w = tomographic_reconstruct(qs, grid, r.args.eta_max, r.args.window)
    r.field("tomo.csv", w)
    r.result.residuals.update(integral=float(w.integral()), minimum=float(w.values.min()))
    if r.args.oracle:
        if rho is None:
            raise UsageError("--oracle needs --state")
        r.result.checks.append(Check("wigner_sup_error", w.sup_distance(wigner(rho, grid)), 1e-2))


def cmd_homodyne_map(r: Runner):
    s2 = squeezing_from_transparency(r.args.gamma)
    doc = {"gamma": r.args.gamma, "s_squared": s2}
    if s2 > 0:
        widths = marginal_widths(float(np.sqrt(s2)))
        doc.update(s=float(np.sqrt(s2)), delta1=widths.delta1, delta2=widths.delta2)
    else:
        doc.update(s=0.0, delta1=0.0, delta2=None)
    r.json("homodyne.json", doc)
    r.result.lines.append(json.dumps(doc))
    r.result.residuals.update({k: v for k, v in doc.items() if isinstance(v, float)})


def _polar(r: Runner, four: bool):
    cfg = _polar_config(r.args, four)
    m, lam, mu, q, p = _setup(cfg)
    tol = r.args.tol
    r.json("config.json", io.polarization_config_to_json(cfg))
    r.json("povm.json", io.collection_to_json(m, "bivariate_povm"))
    r.json("lambda.json", io.matrix_to_json(lam))
    r.json("mu.json", io.matrix_to_json(mu))
    r.json("ideal_q.json", io.collection_to_json(q, "povm"))
    r.json("ideal_p.json", io.collection_to_json(p, "povm"))
    r.result.checks += validate_povm(m, tol).checks
    rows, cols = marginals(m)
    r.result.checks.append(Check("lambda_fit", float(np.max(np.abs(nonideality_fit(rows, q) - lam))), 1e-9))
    r.result.checks.append(Check("mu_fit", float(np.max(np.abs(nonideality_fit(cols, p) - mu))), 1e-9))
    w = wigner_measure(m, invert_nonideality(lam), invert_nonideality(mu))
    if r.args.wigner_measure:
        r.json("wigner_measure.json", io.collection_to_json(w, "wigner_measure"))
        r.result.checks += wigner_marginal_check(w, q, p, r.args.marginal_tol).checks
    comp = informational_completeness(w, 2)
    r.result.lines.append(str(comp))
    r.result.residuals.update(rank=comp.rank)


def cmd_polar2(r: Runner):
    _polar(r, four=False)


def cmd_polar4(r: Runner):
    _polar(r, four=True)


def _read_collection(r: Runner, path):
    return io.collection_from_json(io.read_json(r.input(path)))[1]


def _read_matrix(r: Runner, path):
    return io.matrix_from_json(io.read_json(r.input(path)))


def cmd_wigner_measure(r: Runner):
    a = r.args
    m = _read_collection(r, a.povm)
    q = _read_collection(r, a.ideal_q) if a.ideal_q else None
    p = _read_collection(r, a.ideal_p) if a.ideal_p else None
    rows, cols = marginals(m)
    if a.lambda_file:
        lam = _read_matrix(r, a.lambda_file)
    elif q is not None:
        lam = nonideality_fit(rows, q)
    else:
        raise UsageError("need --lambda or --ideal-q")
    if a.mu_file:
        mu = _read_matrix(r, a.mu_file)
    elif p is not None:
        mu = nonideality_fit(cols, p)
    else:
        raise UsageError("need --mu or --ideal-p")
    linv, minv = invert_nonideality(lam), invert_nonideality(mu)
    r.json("lambda_inverse.json", io.matrix_to_json(linv))
    r.json("mu_inverse.json", io.matrix_to_json(minv))
    w = wigner_measure(m, linv, minv)
    r.json("wigner_measure.json", io.collection_to_json(w, "wigner_measure"))
    if q is not None and p is not None:
        r.result.checks += wigner_marginal_check(w, q, p, a.marginal_tol).checks
    else:
        total = float(np.max(np.abs(w.sum(axis=(0, 1)) - np.eye(w.shape[-1]))))
        r.result.checks.append(Check("total", total, a.marginal_tol))
    r.result.residuals.update(
        lambda_inverse_colsum=float(np.max(np.abs(linv.sum(axis=0) - 1))),
        mu_inverse_colsum=float(np.max(np.abs(minv.sum(axis=0) - 1))),
    )


def cmd_reconstruct(r: Runner):
    a = r.args
    q = p = None
    if a.config:
        cfg = io.polarization_config(io.read_json(r.input(a.config)))
        m, lam, mu, q, p = _setup(cfg)
    else:
        if not (a.lambda_file and a.mu_file):
            raise UsageError("reconstruct needs --config, or --lambda and --mu")
        lam, mu = _read_matrix(r, a.lambda_file), _read_matrix(r, a.mu_file)
        m = _read_collection(r, a.povm) if a.povm else None
        q = _read_collection(r, a.ideal_q) if a.ideal_q else None
        p = _read_collection(r, a.ideal_p) if a.ideal_p else None
    rho = None
    if a.joint:
        joint = _read_matrix(r, a.joint)
    else:
        if m is None:
            raise UsageError("need --joint, or a POVM and --state")
        rho = _load_state(a).rho
        joint = joint_distribution(rho, m)
    r.json("joint.json", io.matrix_to_json(joint))
    q_rec, p_rec = reconstruct_ideal_distribution(joint, invert_nonideality(lam), invert_nonideality(mu))
    doc = {"q": q_rec.tolist(), "p": p_rec.tolist()}
    if rho is not None and q is not None and p is not None:
        q_dir = np.array([expectation(rho, e) for e in q])
        p_dir = np.array([expectation(rho, e) for e in p])
        doc.update(direct_q=q_dir.tolist(), direct_p=p_dir.tolist())
        r.result.checks.append(Check("q_reconstruction", float(np.max(np.abs(q_rec - q_dir))), 1e-10))
        r.result.checks.append(Check("p_reconstruction", float(np.max(np.abs(p_rec - p_dir))), 1e-10))
    r.json("reconstructed.json", doc)
    r.result.residuals.update(q_sum=float(q_rec.sum()), p_sum=float(p_rec.sum()))


def cmd_completeness(r: Runner):
    a = r.args
    if a.config:
        cfg = io.polarization_config(io.read_json(r.input(a.config)))
        m, lam, mu, *_ = _setup(cfg)
        ops = wigner_measure(m, invert_nonideality(lam), invert_nonideality(mu))
    elif a.povm:
        ops = _read_collection(r, a.povm)
    else:
        raise UsageError("completeness needs --povm or --config")
    comp = informational_completeness(ops, ops.shape[-1])
    r.json("completeness.json", {"rank": comp.rank, "dim": comp.dim, "complete": comp.complete})
    r.result.lines.append(str(comp))
    r.result.residuals.update(rank=comp.rank)


def cmd_validate(r: Runner):
    doc = io.read_json(r.input(r.args.file))
    tol = r.args.tol
    if "elements" in doc:
        kind, ops = io.collection_from_json(doc)
        if kind == "wigner_measure":
            total = float(np.max(np.abs(ops.sum(axis=(0, 1)) - np.eye(ops.shape[-1]))))
            r.result.checks.append(Check("total", total, tol))
        else:
            r.result.checks += validate_povm(ops, tol).checks
    elif doc.get("kind") == "matrix":
        r.result.checks += check_nonideality(io.matrix_from_json(doc), tol).checks
    else:
        r.result.checks += validate_density(io.operator_from_json(doc), tol).checks
    r.json("validation.json", {"passed": r.result.passed})


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default: 0)")
    p.add_argument("--tol", type=float, default=1e-10, help="validation tolerance")


def _state_opts(p, required=False):
    p.add_argument("--state", required=required,
                   help="fock:N, coherent:ALPHA, bloch:x,y,z, mixtures 'w*spec;w*spec', or file:PATH")
    p.add_argument("--cutoff", type=int, default=32)


def _squeeze_opts(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--s", type=float, default=1.0, help="squeezing parameter (default 1)")
    g.add_argument("--gamma", type=float, help="mirror transparency; sets s^2 = gamma/(1-gamma)")


def _quad_opts(p):
    p.add_argument("--angles", type=int, default=64)
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--x-range", default="-8,8")
    p.add_argument("--full-circle", action="store_true", help="sample angles over [0, 360) instead of [0, 180)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jointmeas", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func: Callable, help: str):
        p = sub.add_parser(name, help=help)
        _common(p)
        p.set_defaults(func=func)
        return p

    p = add("state", cmd_state, "prepare and validate a Fock-space state")
    _state_opts(p, required=True)

    p = add("wigner", cmd_wigner, "Wigner function on a grid")
    _state_opts(p, required=True)
    p.add_argument("--grid", default="default")

    p = add("husimi", cmd_husimi, "Husimi distribution on a grid")
    _state_opts(p, required=True)
    _squeeze_opts(p)
    p.add_argument("--grid", default="default")

    p = add("smear", cmd_smear, "Gaussian smearing of a Wigner field")
    p.add_argument("--input", help="field CSV (with sidecar JSON)")
    _state_opts(p)
    _squeeze_opts(p)
    p.add_argument("--grid", default="default")
    p.add_argument("--oracle", action="store_true", help="compare with the Husimi route")

    p = add("deconvolve", cmd_deconvolve, "recover a Wigner field from a Husimi field")
    p.add_argument("--input", help="field CSV (with sidecar JSON)")
    _state_opts(p)
    _squeeze_opts(p)
    p.add_argument("--grid", default="default")
    p.add_argument("--k-max", type=float, default=6.0)
    p.add_argument("--no-taper", action="store_true")
    p.add_argument("--max-gain", type=float, default=1e12)
    p.add_argument("--oracle", action="store_true", help="compare with the direct Wigner function")

    p = add("quadratures", cmd_quadratures, "rotated-quadrature distributions")
    _state_opts(p, required=True)
    _quad_opts(p)

    p = add("tomo", cmd_tomo, "tomographic Wigner reconstruction")
    p.add_argument("--input", help="quadrature CSV")
    _state_opts(p)
    _quad_opts(p)
    p.add_argument("--grid", default="default")
    p.add_argument("--eta-max", type=float, default=None)
    p.add_argument("--window", choices=["hann", "none"], default="hann")
    p.add_argument("--oracle", action="store_true", help="report the error against the direct Wigner function")

    p = add("homodyne-map", cmd_homodyne_map, "squeezing and marginal widths from transparency")
    p.add_argument("--gamma", type=float, required=True)

    for name, func, four in (("polar2", cmd_polar2, False), ("polar4", cmd_polar4, True)):
        p = add(name, func, f"{'four' if four else 'two'}-port polarization measurement")
        p.add_argument("--config", help="polarization config JSON")
        if four:
            for i, default in ((1, 0.5), (2, 0.5), (3, 0.5)):
                p.add_argument(f"--gamma{i}", type=float, default=default)
        else:
            p.add_argument("--gamma", type=float)
        for i in range(1, 5 if four else 3):
            p.add_argument(f"--theta{i}", type=float, help="linear analyzer angle in degrees")
            p.add_argument(f"--dir{i}", help="Poincare direction x,y,z")
        p.add_argument("--wigner-measure", action="store_true", help="also emit the Wigner measure")
        p.add_argument("--marginal-tol", type=float, default=1e-12)

    p = add("wigner-measure", cmd_wigner_measure, "Wigner measure of a bivariate POVM")
    p.add_argument("--povm", required=True)
    p.add_argument("--lambda", dest="lambda_file")
    p.add_argument("--mu", dest="mu_file")
    p.add_argument("--ideal-q")
    p.add_argument("--ideal-p")
    p.add_argument("--marginal-tol", type=float, default=1e-12)

    p = add("reconstruct", cmd_reconstruct, "ideal distributions from a joint distribution")
    p.add_argument("--config")
    p.add_argument("--povm")
    p.add_argument("--lambda", dest="lambda_file")
    p.add_argument("--mu", dest="mu_file")
    p.add_argument("--ideal-q")
    p.add_argument("--ideal-p")
    p.add_argument("--joint", help="joint distribution as matrix JSON")
    _state_opts(p)

    p = add("completeness", cmd_completeness, "span-rank completeness test")
    p.add_argument("--povm")
    p.add_argument("--config")

    p = add("validate", cmd_validate, "validate a state, POVM or nonideality file")
    p.add_argument("--file", required=True)
    return parser


def _fail(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        runner = Runner(args)
        args.func(runner)
    except (JointMeasError, ValueError, OSError, KeyError) as exc:
        return _fail(exc, 2)
    result = runner.result
    io.write_json(runner.out / "manifest.json", result.manifest())
    print(emit_report(result))
    return 0 if result.passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
