"""Scenario documents, grid sampling and file emission.

A scenario is a JSON object with the sections below; every key is optional
and missing keys take the values shown (the parameter set of the stopped
soliton used throughout the package)::

    {
      "medium":  {"nu0": 10.0, "delta": 0.0, "c": 1.0},
      "soliton": {"epsilon0": 2.1, "phi0": -2.6, "theta0": 0.0},
      "control": {"omega0": 2.0, "alpha": 1.0},
      "grid":    {"zeta_min": 0.0, "zeta_max": 3.0, "tau_min": -15.0,
                  "tau_max": 30.0, "n_zeta": 151, "n_tau": 451},
      "frame":   "lab",
      "z0":      0.0,
      "outputs": ["fields", "populations", "summary"],
      "tolerances": {...}
    }

``soliton.lambda`` = [re, im] may replace ``epsilon0`` (which means
lambda = -i epsilon0).  The default ``phi0`` puts the soliton centre near
zeta = 1 at the switch-off instant tau = 0.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import shutil
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import core
from .core import ControlField, MediumParams, SolitonParams
from .errors import ConfigError, DomainError, OutputError, SchemaError, ValidationError
from .integrator import Grid2D, SolutionGrid, integrate, residual

__all__ = [
    "OUTPUT_KINDS",
    "SampledData",
    "Scenario",
    "SummaryReport",
    "Tolerances",
    "apply_overrides",
    "build_summary",
    "emit_outputs",
    "exact_solution",
    "numeric_solution",
    "parse_scenario",
    "sample",
]

OUTPUT_KINDS = ("fields", "populations", "summary", "residuals")
FRAMES = ("retarded", "lab")
QUANTITIES = {"fields": ("I_a", "I_b"), "populations": ("P1", "P2", "P3")}


@dataclass(frozen=True)
class Tolerances:
    """Pass/fail limits used by the ``verify`` command."""

    riccati: float = 1e-6
    boundary: float = 1e-10
    norm: float = 1e-10
    norm_drift: float = 1e-6
    numeric_field: float = 5e-3
    numeric_population: float = 5e-3
    transparency: float = 1e-8
    residual_order_min: float = 3.5
    residual_order_max: float = 4.5


@dataclass(frozen=True)
class Scenario:
    medium: MediumParams = field(default_factory=MediumParams)
    soliton: SolitonParams = field(default_factory=lambda: SolitonParams(-2.1j, -2.6, 0.0))
    control: ControlField = field(default_factory=ControlField)
    grid: Grid2D = field(default_factory=Grid2D)
    frame: str = "lab"
    outputs: tuple = ("fields", "populations", "summary")
    z0: float = 0.0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_dict(self):
        lam = self.soliton.lam
        return {
            "medium": asdict(self.medium),
            "soliton": {"lambda": [lam.real, lam.imag],
                        "phi0": self.soliton.phi0, "theta0": self.soliton.theta0},
            "control": asdict(self.control),
            "grid": asdict(self.grid),
            "frame": self.frame,
            "z0": self.z0,
            "outputs": list(self.outputs),
            "tolerances": asdict(self.tolerances),
        }


_NUM = "number"
_INT = "integer"
_SCHEMA = {
    "medium": {"nu0": _NUM, "delta": _NUM, "c": _NUM},
    "soliton": {"epsilon0": _NUM, "lambda": "pair", "phi0": _NUM, "theta0": _NUM},
    "control": {"omega0": _NUM, "alpha": _NUM},
    "grid": {"zeta_min": _NUM, "zeta_max": _NUM, "tau_min": _NUM, "tau_max": _NUM,
             "n_zeta": _INT, "n_tau": _INT},
    "tolerances": {name: _NUM for name in Tolerances.__dataclass_fields__},
}


def _check_value(path, kind, value):
    if kind == _NUM:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
    elif kind == _INT:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = (isinstance(value, list) and len(value) == 2
              and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value))
    if not ok:
        raise SchemaError(path, f"expected {kind}, got {value!r}")
    return value


def _section(doc, name):
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise SchemaError(name, f"expected an object, got {type(raw).__name__}")
    out = {}
    for key, value in raw.items():
        kind = _SCHEMA[name].get(key)
        if kind is None:
            raise SchemaError(f"{name}.{key}", "unknown key")
        out[key] = _check_value(f"{name}.{key}", kind, value)
    return out


def parse_scenario(text):
    """Validate a scenario document (JSON text or an already decoded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("<document>", f"invalid JSON: {exc}") from exc
    else:
        doc = text
    if not isinstance(doc, dict):
        raise SchemaError("<document>", "top level must be an object")
    allowed = set(_SCHEMA) | {"frame", "outputs", "z0"}
    for key in doc:
        if key not in allowed:
            raise SchemaError(key, "unknown key")

    medium = MediumParams(**_section(doc, "medium"))
    control = ControlField(**_section(doc, "control"))
    sol = _section(doc, "soliton")
    if "lambda" in sol and "epsilon0" in sol:
        raise SchemaError("soliton", "give either lambda or epsilon0, not both")
    if "lambda" in sol:
        lam = complex(*sol.pop("lambda"))
    else:
        lam = -1j * sol.pop("epsilon0", 2.1)
    sol.setdefault("phi0", -2.6)
    try:
        soliton = SolitonParams(lam=lam, **sol)
    except ValidationError as exc:
        raise ValidationError(f"soliton: {exc}") from None
    if lam.real == 0 and not -lam.imag > control.omega0:
        raise ValidationError(
            f"soliton.epsilon0 = {-lam.imag:g} must exceed control.omega0 = {control.omega0:g}"
        )
    grid_doc = _section(doc, "grid")
    try:
        grid = Grid2D(**grid_doc)
    except ConfigError as exc:
        raise ValidationError(f"grid: {exc}") from None
    tolerances = Tolerances(**_section(doc, "tolerances"))

    frame = doc.get("frame", "lab")
    if frame not in FRAMES:
        raise SchemaError("frame", f"expected one of {FRAMES}, got {frame!r}")
    outputs = doc.get("outputs", ["fields", "populations", "summary"])
    if not isinstance(outputs, list) or any(o not in OUTPUT_KINDS for o in outputs):
        raise SchemaError("outputs", f"expected a list drawn from {OUTPUT_KINDS}, got {outputs!r}")
    if not outputs:
        raise ValidationError("outputs must not be empty")
    z0 = _check_value("z0", _NUM, doc.get("z0", 0.0))
    ordered = tuple(k for k in OUTPUT_KINDS if k in outputs)
    return Scenario(medium, soliton, control, grid, frame, ordered, float(z0), tolerances)


def _coerce(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc, assignments):
    """Apply ``section.key=value`` strings to a decoded document, in order.

    Values are read as JSON when possible (so ``grid.n_tau=901`` is an int and
    ``outputs=["fields"]`` a list) and kept as strings otherwise.
    """
    doc = json.loads(json.dumps(doc))
    for item in assignments:
        if "=" not in item:
            raise SchemaError(item, "override must look like key=value")
        path, value = item.split("=", 1)
        keys = path.strip().split(".")
        node = doc
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise SchemaError(path, "cannot descend into a non-object")
        node[keys[-1]] = _coerce(value)
    return doc


# --- sampling -----------------------------------------------------------------


def _breakpoints(cf: ControlField):
    return (0.0,) if cf.alpha > 0 else ()


def exact_solution(grid: Grid2D, mp, sp, cf) -> SolutionGrid:
    fs, st = core.evaluate(grid.zeta[:, None], grid.tau[None, :], mp, sp, cf)
    return SolutionGrid(grid, fs.omega_a, fs.omega_b, st.as_array(), _breakpoints(cf))


def numeric_solution(grid: Grid2D, mp, sp, cf, check_norm=True) -> SolutionGrid:
    """Integrate from the exact boundary profile at zeta_min and exact state at tau_min."""
    boundary = core.fields(grid.zeta_min, grid.tau, mp, sp, cf)
    initial = core.atom_state(grid.zeta, grid.tau_min, mp, sp, cf).as_array()
    return integrate(mp, boundary, initial, grid, breakpoints=_breakpoints(cf),
                     check_norm=check_norm)


@dataclass
class SampledData:
    """Real-valued grids indexed [i_time, i_space] plus the retarded solution.

    In the lab frame ``time``/``space`` are t and z; in the retarded frame
    they are tau and zeta.
    """

    frame: str
    time: np.ndarray
    space: np.ndarray
    grids: dict
    solution: SolutionGrid

    @property
    def axis_names(self):
        return ("t", "z") if self.frame == "lab" else ("tau", "zeta")


def _derived(oa, ob, psi):
    p = np.abs(psi) ** 2
    return {"I_a": np.abs(oa) ** 2, "I_b": np.abs(ob) ** 2,
            "P1": p[..., 0], "P2": p[..., 1], "P3": p[..., 2]}


def sample(scn: Scenario, source="exact") -> SampledData:
    """Intensities I_a, I_b and populations P1..P3 on the scenario grid.

    The lab frame reuses the grid numbers: z = z0 + c zeta_i and t = tau_j,
    evaluated at retarded time tau = t - zeta.  Numeric lab data come from a
    retarded run over a tau window widened to cover every (t, z) node,
    linearly interpolated along tau.
    """
    mp, sp, cf, g = scn.medium, scn.soliton, scn.control, scn.grid
    if source not in ("exact", "numeric"):
        raise ValueError(f"unknown source {source!r}")
    solve = exact_solution if source == "exact" else numeric_solution
    zeta, tau = g.zeta, g.tau

    if scn.frame == "retarded":
        sol = solve(g, mp, sp, cf)
        grids = {k: v.T.copy() for k, v in _derived(sol.omega_a, sol.omega_b, sol.psi).items()}
        return SampledData("retarded", tau, zeta, grids, sol)

    z = scn.z0 + mp.c * zeta
    t = tau
    if source == "exact":
        sol = solve(g, mp, sp, cf)
        fs, st = core.evaluate(zeta[None, :], t[:, None] - zeta[None, :], mp, sp, cf)
        grids = _derived(fs.omega_a, fs.omega_b, st.as_array())
        return SampledData("lab", t, z, grids, sol)

    lo, hi = g.tau_min - g.zeta_max, g.tau_max - g.zeta_min
    n = int(math.ceil((hi - lo) / g.d_tau - 1e-9)) + 1
    wide = Grid2D(g.zeta_min, g.zeta_max, lo, lo + (n - 1) * g.d_tau, g.n_zeta, n)
    sol = solve(wide, mp, sp, cf)
    ret = _derived(sol.omega_a, sol.omega_b, sol.psi)
    grids = {}
    for name, values in ret.items():
        out = np.empty((len(t), len(zeta)))
        for i, zi in enumerate(zeta):
            out[:, i] = np.interp(t - zi, wide.tau, values[i])
        grids[name] = out
    return SampledData("lab", t, z, grids, sol)


# --- summary ------------------------------------------------------------------


@dataclass
class SummaryReport:
    parameters: dict
    w0: dict
    stopping_distance: float | None
    stopping_distance_instant: float
    memory_width: float
    group_velocity: list
    residuals: dict | None = None

    def __post_init__(self):
        if self.stopping_distance is not None and not self.stopping_distance > 0:
            raise ValidationError(f"stopping distance must be positive, got {self.stopping_distance}")
        if not self.memory_width > 0:
            raise ValidationError(f"memory width must be positive, got {self.memory_width}")

    def as_dict(self):
        d = asdict(self)
        if d["residuals"] is None:
            del d["residuals"]
        return d


def build_summary(scn: Scenario, residuals=None) -> SummaryReport:
    mp, sp, cf, g = scn.medium, scn.soliton, scn.control, scn.grid
    w0 = core.w_initial(sp.lam, cf.omega0)
    ls = None
    if cf.alpha > 0:
        try:
            ls = core.stopping_distance(mp, sp, cf)
        except DomainError:
            ls = None
    taus = np.concatenate([[g.tau_min], np.linspace(0.0, max(g.tau_max, 0.0), 10)])
    vg = np.atleast_1d(core.group_velocity(taus, mp, sp, cf))
    table = [{"tau": float(a), "v_over_c": float(b)} for a, b in zip(taus, vg)]
    return SummaryReport(
        parameters=scn.to_dict(),
        w0={"re": w0.real, "im": w0.imag},
        stopping_distance=ls,
        stopping_distance_instant=core.stopping_distance_limit(mp, sp, cf),
        memory_width=core.memory_width(mp, sp),
        group_velocity=table,
        residuals=residuals,
    )


def residual_norms(sol: SolutionGrid, mp):
    return residual(sol, mp).as_dict()


# --- emission -----------------------------------------------------------------


def _write_csv(path, data: SampledData, values):
    T, Z = np.meshgrid(data.time, data.space, indexing="ij")
    table = np.column_stack([T.ravel(), Z.ravel(), np.asarray(values).ravel()])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(data.axis_names + ("value",)) + "\n")
        np.savetxt(fh, table, fmt="%.9e", delimiter=",")


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def emit_outputs(data: SampledData | None, destination, quantities=(), documents=None):
    """Write CSV grids and JSON documents, then ``manifest.json``.

    ``quantities`` names the grids of ``data`` to write (I_a, I_b, P1, ...);
    ``documents`` maps a base name to a JSON-serialisable dict.  Files are
    staged in a sibling temporary directory and moved into ``destination``
    only after every write succeeded.  Returns the manifest dict.
    """
    destination = Path(destination)
    documents = documents or {}
    try:
        destination.parent.mkdir(parents=True, exist_ok=True)
        stage = Path(tempfile.mkdtemp(prefix=".slowlight-", dir=destination.parent))
    except OSError as exc:
        raise OutputError(destination, exc.strerror or str(exc)) from exc
    try:
        names = []
        for q in quantities:
            name = f"{q}.csv"
            _write_csv(stage / name, data, data.grids[q])
            names.append(name)
        for base, doc in documents.items():
            name = f"{base}.json"
            _write_json(stage / name, doc)
            names.append(name)
        manifest = {"files": [
            {"name": n, "sha256": _sha256(stage / n), "bytes": (stage / n).stat().st_size}
            for n in sorted(names)
        ]}
        _write_json(stage / "manifest.json", manifest)
        if destination.exists():
            for n in names + ["manifest.json"]:
                os.replace(stage / n, destination / n)
        else:
            os.rename(stage, destination)
    except OSError as exc:
        raise OutputError(getattr(exc, "filename", None) or destination,
                          exc.strerror or str(exc)) from exc
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return manifest
