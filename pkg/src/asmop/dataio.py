"""Experiment configuration (YAML) and trace CSV persistence."""

from __future__ import annotations

import csv
import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .baselines import SmgConfig
from .errors import ConfigError, InputError
from .front import FrontConfig
from .problems import (
    load_csv_dataset,
    make_least_squares_problem,
    make_logistic_problem,
    make_mixed_problem,
    make_quadratic_problem,
    make_synthetic_classification,
)
from .sampling import SamplingConfig
from .solver import IterateRecord, RunTrace, SolverConfig

FAMILIES = ("logistic", "least-squares", "mixed", "quadratic")
SOLVER_NAMES = ("asmop", "smg", "det-motr")
SYNTHETIC_KEYS = ("n", "N", "seed", "separation")


@dataclass
class ProblemSpec:
    family: str = "logistic"
    q: int = 2
    synthetic: dict | None = None
    datasets: list | None = None
    ridge: float | list = 0.01
    centers: list | None = None

    def ridges(self):
        if isinstance(self.ridge, (list, tuple)):
            return [float(r) for r in self.ridge]
        return [float(self.ridge)] * self.q


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    solver: SolverConfig = field(default_factory=SolverConfig)
    smg: SmgConfig = field(default_factory=SmgConfig)
    front: FrontConfig = field(default_factory=FrontConfig)
    solvers: list = field(default_factory=lambda: ["asmop"])
    seeds: list = field(default_factory=lambda: [0])
    output: str = "out"
    labels: dict = field(default_factory=dict)
    base_dir: str = field(default=".", compare=False)

    def label(self, solver):
        return self.labels.get(solver, solver.upper())

    def resolve(self, path):
        return str(Path(self.base_dir) / path)


def _build(cls, data, prefix, errors, nested=None):
    """Instantiate dataclass ``cls`` from a mapping, recording unknown keys."""
    nested = nested or {}
    if data is None:
        data = {}
    if not isinstance(data, dict):
        errors.append(f"{prefix} must be a mapping")
        return cls() if prefix != "problem" else None
    names = {f.name for f in dataclasses.fields(cls) if f.init and f.name != "base_dir"}
    unknown = sorted(set(data) - names)
    for key in unknown:
        errors.append(f"unknown key {prefix}.{key}")
    kwargs = {k: v for k, v in data.items() if k in names}
    for key, sub in nested.items():
        if key in kwargs:
            kwargs[key] = _build(sub, kwargs[key], f"{prefix}.{key}", errors)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"{prefix}: {exc}")
        return None


def _problem_errors(spec, base_dir):
    out = []
    if spec.family not in FAMILIES:
        out.append(f"problem.family must be one of {FAMILIES}")
        return out
    if spec.family == "quadratic":
        if not spec.centers:
            out.append("problem.centers is required for the quadratic family")
        return out
    if spec.family == "mixed" and spec.q != 2:
        out.append("problem.q must be 2 for the mixed family")
    if spec.q < 1:
        out.append("problem.q must be >= 1")
    if spec.synthetic is None and not spec.datasets:
        out.append("problem needs either synthetic or datasets")
    if spec.synthetic is not None and spec.datasets:
        out.append("problem.synthetic and problem.datasets are mutually exclusive")
    if spec.synthetic is not None:
        if not isinstance(spec.synthetic, dict):
            out.append("problem.synthetic must be a mapping")
        else:
            for key in sorted(set(spec.synthetic) - set(SYNTHETIC_KEYS)):
                out.append(f"unknown key problem.synthetic.{key}")
            for key in ("n", "N"):
                if key not in spec.synthetic:
                    out.append(f"problem.synthetic.{key} is required")
    if spec.datasets:
        if len(spec.datasets) != spec.q:
            out.append(f"problem.datasets needs {spec.q} entries (one per component)")
        for path in spec.datasets:
            if not os.path.exists(Path(base_dir) / path):
                out.append(f"dataset file not found: {path}")
    if isinstance(spec.ridge, (list, tuple)) and len(spec.ridge) != spec.q:
        out.append("problem.ridge list needs one entry per component")
    if any(r < 0 for r in spec.ridges()):
        out.append("problem.ridge must be nonnegative")
    return out


def parse_config(data, base_dir="."):
    """Validate a config mapping; raises ``ConfigError`` listing every problem."""
    errors = []
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    names = {f.name for f in dataclasses.fields(ExperimentConfig) if f.name != "base_dir"}
    for key in sorted(set(data) - names):
        errors.append(f"unknown key {key}")
    if "problem" not in data:
        errors.append("problem missing")
        problem = None
    else:
        problem = _build(ProblemSpec, data["problem"], "problem", errors)
        if problem is not None:
            errors.extend(_problem_errors(problem, base_dir))
    solver = _build(SolverConfig, data.get("solver"), "solver", errors, {"sampling": SamplingConfig})
    if solver is not None:
        errors.extend(f"solver: {p}" for p in solver.problems())
    smg = _build(SmgConfig, data.get("smg"), "smg", errors)
    if smg is not None:
        errors.extend(smg.problems())
    front = _build(FrontConfig, data.get("front"), "front", errors)
    if front is not None:
        errors.extend(front.problems())
    solvers = data.get("solvers", ["asmop"])
    if not isinstance(solvers, list) or not solvers:
        errors.append("solvers must be a nonempty list")
    else:
        errors.extend(f"unknown solver {s!r}" for s in solvers if s not in SOLVER_NAMES)
    seeds = data.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
        errors.append("seeds must be a nonempty list of integers")
    labels = data.get("labels", {}) or {}
    if not isinstance(labels, dict):
        errors.append("labels must be a mapping")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(problem=problem, solver=solver, smg=smg, front=front, solvers=solvers,
                            seeds=seeds, output=str(data.get("output", "out")), labels=labels,
                            base_dir=str(base_dir))


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, base_dir=path.parent)


def config_to_dict(config):
    out = dataclasses.asdict(config)
    out.pop("base_dir")
    return out


def write_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config_to_dict(config), fh, sort_keys=False)


def build_problem(config):
    spec = config.problem
    if spec.family == "quadratic":
        return make_quadratic_problem(spec.centers)
    if spec.datasets:
        data = [load_csv_dataset(config.resolve(p)) for p in spec.datasets]
    else:
        syn = spec.synthetic
        data = make_synthetic_classification(int(syn["n"]), int(syn["N"]), spec.q, int(syn.get("seed", 0)),
                                             float(syn.get("separation", 1.0)))
    A = [d.features for d in data]
    y = [d.labels for d in data]
    if spec.family == "logistic":
        return make_logistic_problem(A, y, spec.ridges())
    if spec.family == "least-squares":
        return make_least_squares_problem(A, y, spec.ridges())
    return make_mixed_problem((A[0], y[0]), (A[1], y[1]), ridge=spec.ridges()[0])


# ---------------------------------------------------------------- traces

def trace_header(q):
    return (["k", "cost", "delta", "omega_sub", "omega_true", "rho_N", "rho_D", "accepted"]
            + [f"N_k_{i + 1}" for i in range(q)]
            + ["phi_sub", "phi_trial", "model_decrease", "beta", "phi_fix"]
            + [f"branch_{i + 1}" for i in range(q)])


def _fmt(v):
    if v is None:
        return ""
    return repr(float(v))


def _opt_float(s):
    return None if s == "" else float(s)


def write_trace(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(trace.q))
        for r in trace.records:
            w.writerow([r.k, r.cost, _fmt(r.delta), _fmt(r.omega_sub), _fmt(r.omega_true), _fmt(r.rho_N),
                        _fmt(r.rho_D), int(bool(r.accepted)), *r.sizes, _fmt(r.phi_sub), _fmt(r.phi_trial),
                        _fmt(r.model_decrease), _fmt(r.beta), _fmt(r.phi_fix), *r.branches])


def read_trace(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(fh)
        try:
            header = next(rows)
        except StopIteration:
            raise InputError(f"{path}: empty file (missing header)") from None
        q = sum(1 for h in header if h.startswith("N_k_"))
        if q < 1 or header != trace_header(q):
            raise InputError(f"{path}:1: unexpected header")
        trace = RunTrace(q=q)
        width = len(header)
        for lineno, row in enumerate(rows, start=2):
            if len(row) != width:
                raise InputError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
            try:
                sizes = tuple(int(v) for v in row[8:8 + q])
                rest = row[8 + q:]
                trace.records.append(IterateRecord(
                    k=int(row[0]), cost=int(row[1]), delta=float(row[2]), omega_sub=float(row[3]),
                    omega_true=_opt_float(row[4]), rho_N=_opt_float(row[5]), rho_D=_opt_float(row[6]),
                    accepted=bool(int(row[7])), sizes=sizes, phi_sub=float(rest[0]),
                    phi_trial=_opt_float(rest[1]), model_decrease=_opt_float(rest[2]),
                    beta=_opt_float(rest[3]), phi_fix=_opt_float(rest[4]), branches=tuple(rest[5:]),
                ))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    return trace


def write_front(archive, path):
    q = len(archive.entries[0].f) if archive.entries else 0
    n = len(archive.entries[0].x) if archive.entries else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f{i + 1}" for i in range(q)] + [f"x{j + 1}" for j in range(n)])
        for e in archive.entries:
            w.writerow([repr(float(v)) for v in e.f] + [repr(float(v)) for v in e.x])

