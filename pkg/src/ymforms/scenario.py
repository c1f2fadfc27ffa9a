"""Declarative scenario files and the reports produced from them.

A scenario is a small JSON document::

    {
      "name": "bpst",
      "dim": 2,
      "metric": "euclidean",
      "connection": {"builtin": "bpst", "params": {"mu": 1.0}},
      "trace": "matrix",
      "quadrature": {"radius": 6.0, "nodes_per_axis": 16, "rule": "gauss"},
      "checks": ["duality", "bianchi", "vacuum", "eb-inner"],
      "seed": 0
    }

``connection`` is either a builtin with parameters or ``{"custom": {...}}``
with four polynomial components ``A1, A2, A1b, A2b``, each a list of
``{"powers": [a, b, c, d], "matrix": [[[re, im], ...], ...]}`` terms for
``z1^a z2^b zb1^c zb2^d``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import TraceKind, matrix_from_json
from .coefficients import poly_from_json
from .hodge import QuadratureSpec, get_metric
from .yang_mills import Connection

__all__ = [
    "ScenarioError",
    "Scenario",
    "BUILTINS",
    "parse_scenario",
    "load_scenario",
    "bundled_scenarios",
    "build_connection",
    "eta_from_params",
    "CheckResult",
    "Report",
]


class ScenarioError(ValueError):
    """Schema violation; ``problems`` lists every offending field."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# builtin name -> {param: kind}; an "optional-" kind may be omitted
BUILTINS = {
    "bpst": {"mu": "optional-float"},
    "eta-potential": {"h": "optional-poly", "A1_shift": "optional-matrix"},
    "dirac-monopole": {"B1": "matrix", "B2": "matrix"},
    "constant": {"A1": "matrix", "A2": "matrix"},
    "nilpotent-minkowski-sd": {},
    "none": {},
}
_FIXED_DIM = {"bpst": 2, "eta-potential": 2, "nilpotent-minkowski-sd": 3}
_COMPONENTS = ("A1", "A2", "A1b", "A2b")
_FIELDS = {"name", "dim", "metric", "connection", "trace", "quadrature", "checks", "seed", "points",
           "sample_radius", "tolerance"}


@dataclass
class Scenario:
    name: str
    dim: int
    metric: str
    connection: dict
    trace: TraceKind = TraceKind.MATRIX
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    checks: list = field(default_factory=list)
    seed: int = 0
    points: int = 100
    sample_radius: float = 2.0
    tolerance: float | None = None

    @property
    def builtin(self) -> str:
        return self.connection.get("builtin", "custom")

    @property
    def params(self) -> dict:
        return self.connection.get("params", {})

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "metric": self.metric,
            "connection": self.connection,
            "trace": self.trace.value,
            "quadrature": self.quadrature.to_json(),
            "checks": list(self.checks),
            "seed": self.seed,
            "points": self.points,
            "sample_radius": self.sample_radius,
        }


def _check_param(kind, value, dim, where, problems):
    try:
        if kind.endswith("float"):
            v = float(value)
            if not np.isfinite(v):
                raise ValueError("not finite")
            return v
        if kind == "matrix" or kind == "optional-matrix":
            return matrix_from_json(value, dim)
        if kind == "poly" or (kind == "optional-poly" and value is not None):
            return poly_from_json(value, None if kind == "optional-poly" else dim)
        return None
    except (TypeError, ValueError) as exc:
        problems.append(f"{where}: {exc}")
        return None


def parse_scenario(data: dict, source: str = "<scenario>") -> Scenario:
    """Validate a decoded scenario document; raises ScenarioError listing all problems."""
    from .checks import CHECKS

    problems = []
    if not isinstance(data, dict):
        raise ScenarioError([f"{source}: top level must be a JSON object"])
    extra = set(data) - _FIELDS
    if extra:
        problems.append(f"unknown fields {sorted(extra)}")
    for key in ("name", "connection"):
        if key not in data:
            problems.append(f"missing field '{key}'")
    conn = data.get("connection", {})
    if not isinstance(conn, dict):
        problems.append("connection must be an object")
        conn = {}
    builtin = conn.get("builtin", "custom" if "custom" in conn else None)
    if builtin is None:
        problems.append("connection needs 'builtin' or 'custom'")
    elif builtin != "custom" and builtin not in BUILTINS:
        problems.append(f"unknown builtin {builtin!r}; known: {sorted(BUILTINS)}")

    dim = data.get("dim", _FIXED_DIM.get(builtin))
    if dim is None:
        if builtin == "custom" or builtin in BUILTINS:
            problems.append("missing field 'dim'")
    elif not isinstance(dim, int) or dim < 1:
        problems.append("dim must be a positive integer")
        dim = None
    if builtin in _FIXED_DIM and dim is not None and dim != _FIXED_DIM[builtin]:
        problems.append(f"builtin {builtin!r} has dim {_FIXED_DIM[builtin]}, scenario says {dim}")

    if builtin in BUILTINS:
        params = conn.get("params", {})
        if not isinstance(params, dict):
            problems.append("connection.params must be an object")
            params = {}
        spec = BUILTINS[builtin]
        unknown = set(params) - set(spec)
        if unknown:
            problems.append(f"connection.params: unknown {sorted(unknown)} for {builtin!r}")
        for name, kind in spec.items():
            if name not in params and not kind.startswith("optional-"):
                problems.append(f"connection.params.{name} is required for {builtin!r}")
            elif name in params:
                _check_param(kind, params[name], dim, f"connection.params.{name}", problems)
        if builtin == "bpst" and isinstance(params.get("mu"), (int, float)) and not params["mu"] > 0:
            problems.append("connection.params.mu must be positive")
    elif builtin == "custom":
        comps = conn.get("custom", {})
        if not isinstance(comps, dict) or set(comps) - set(_COMPONENTS):
            problems.append(f"connection.custom must map a subset of {list(_COMPONENTS)} to polynomials")
        else:
            for name, value in comps.items():
                _check_param("poly", value, dim, f"connection.custom.{name}", problems)

    metric = data.get("metric", "euclidean")
    try:
        metric = get_metric(metric).name
    except ValueError as exc:
        problems.append(str(exc))
    try:
        trace = TraceKind.parse(data.get("trace"))
    except ValueError:
        problems.append(f"trace must be 'matrix' or 'state', got {data.get('trace')!r}")
        trace = TraceKind.MATRIX
    try:
        quad = QuadratureSpec.from_json(data.get("quadrature", {}))
    except (TypeError, ValueError) as exc:
        problems.append(f"quadrature: {exc}")
        quad = QuadratureSpec()
    checks = data.get("checks", [])
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        problems.append("checks must be a list of names")
        checks = []
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        problems.append(f"unknown checks {bad}; known: {sorted(CHECKS)}")
    for key in ("seed", "points"):
        if key in data and (not isinstance(data[key], int) or data[key] < 0):
            problems.append(f"{key} must be a non-negative integer")
    for key in ("sample_radius", "tolerance"):
        if key in data and (not isinstance(data[key], (int, float)) or data[key] <= 0):
            problems.append(f"{key} must be a positive number")
    if problems:
        raise ScenarioError([f"{source}: {p}" for p in problems])
    return Scenario(
        name=str(data["name"]),
        dim=int(dim),
        metric=metric,
        connection=conn,
        trace=trace,
        quadrature=quad,
        checks=list(checks),
        seed=int(data.get("seed", 0)),
        points=int(data.get("points", 100)),
        sample_radius=float(data.get("sample_radius", 2.0)),
        tolerance=None if data.get("tolerance") is None else float(data["tolerance"]),
    )


def bundled_scenarios() -> list:
    return sorted(p.name[:-5] for p in resources.files("ymforms").joinpath("scenarios").iterdir()
                  if p.name.endswith(".json"))


def load_scenario(path) -> Scenario:
    """Read a scenario file; a bare bundled name such as ``bpst`` also works."""
    p = Path(path)
    if not p.exists():
        name = p.name[:-5] if p.name.endswith(".json") else p.name
        bundled = resources.files("ymforms").joinpath("scenarios", f"{name}.json")
        if str(path) == p.name and bundled.is_file():
            text = bundled.read_text()
        else:
            raise FileNotFoundError(f"scenario file not found: {path}")
    else:
        text = p.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: invalid JSON ({exc})"]) from exc
    return parse_scenario(data, str(path))


def eta_from_params(params: dict):
    """Holomorphic potential for the ``eta-potential`` builtin.

    ``A1_shift`` adds a constant matrix to A1; it exists to tamper with a
    known-good connection in negative controls.
    """
    from . import instantons as inst
    from .coefficients import constant

    h = params.get("h")
    eta = inst.eta_potential_form(None if h is None else poly_from_json(h))
    shift = params.get("A1_shift")
    if shift is not None:
        S = matrix_from_json(shift, eta.dim)
        normal = bool(np.allclose(S @ S.conj().T, S.conj().T @ S))
        eta = inst.EtaForm(eta.A1 + constant(S), eta.A2, holomorphic=True, normal=normal and eta.normal)
    return eta


def build_connection(sc: Scenario):
    """Connection for a scenario plus the family object (BPST, eta form, report) if any."""
    from . import instantons as inst

    name, params = sc.builtin, sc.params
    if name == "bpst":
        b = inst.build_bpst(float(params.get("mu", 1.0)))
        return b.connection, b
    if name == "eta-potential":
        eta = eta_from_params(params)
        return inst.from_eta(eta), eta
    if name == "dirac-monopole":
        A, rep = inst.build_dirac_monopole(matrix_from_json(params["B1"]), matrix_from_json(params["B2"]))
        return A, rep
    if name == "constant":
        A, rep = inst.build_constant(matrix_from_json(params["A1"]), matrix_from_json(params["A2"]))
        return A, rep
    if name == "nilpotent-minkowski-sd":
        return inst.nilpotent_minkowski_sd(), None
    if name == "none":
        return None, None
    comps = sc.connection["custom"]
    cs = [poly_from_json(comps[k], sc.dim) if k in comps else poly_from_json([], sc.dim) for k in _COMPONENTS]
    return Connection(*cs), None


# ---------------------------------------------------------------------------
# reports


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | info
    worst: float
    tolerance: float | None
    points: int
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "worst": None if self.worst is None or not np.isfinite(self.worst) else float(self.worst),
            "tolerance": self.tolerance,
            "points": self.points,
            "detail": self.detail,
        }


@dataclass
class Report:
    scenario: str
    seed: int
    metric: str
    checks: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "fail" if any(c.status == "fail" for c in self.checks) else "pass"

    @property
    def exit_code(self) -> int:
        return 1 if self.status == "fail" else 0

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "metric": self.metric,
            "status": self.status,
            "checks": [c.to_json() for c in self.checks],
        }

    def summary(self) -> str:
        lines = [f"scenario {self.scenario} (metric {self.metric}, seed {self.seed})"]
        for c in self.checks:
            tol = "" if c.tolerance is None else f" tol {c.tolerance:.0e}"
            worst = "" if c.worst is None else f" worst {c.worst:.3e}"
            lines.append(f"  [{c.status.upper():4}] {c.name}:{worst}{tol} ({c.points} pts) {c.detail}".rstrip())
        lines.append(f"overall: {self.status}")
        return "\n".join(lines)
