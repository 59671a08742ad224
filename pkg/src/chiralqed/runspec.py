"""Run configuration documents: schema, parsing and validation.

A run is described by a single JSON document.  Complex numbers are
two-element arrays ``[re, im]``.  Top-level keys::

    {
      "ensemble":   {"preset": "single_atom" | "two_atom",
                     "gamma": 0.2, "gamma_prime": 0.8,     # or "ratio" (+ "gamma_tot")
                     "omega_eg": 100.0}                    # optional
                 or {"omega_eg": 100.0,
                     "atoms": [{"z": 0.0, "coupling": [0.6324, 0.0]}, ...]},
      "reservoir":  {"mode": "independent", "gamma_prime": 0.8 | [..]}
                 or {"mode": "matrix", "k_prime": [[[re, im], ...], ...]}
                 or {"mode": "symmetric_pair", "gamma_prime": 0.8},   # two emitters
      "tasks":      [{"type": "spectrum"},
                     {"type": "transmission", "k_span": [a, b], "points": 2048,
                      "mode": "markov" | "exact"},
                     {"type": "winding", "k_span": [a, b], "points": 2048},
                     {"type": "boundstates", "z_span": [a, b], "points": 2001},
                     {"type": "g2", "tau_span": [0, 10], "points": 201,
                      "normalization": "asymptotic_unit" | "raw"},
                     {"type": "sweep", "parameter": "gamma_ratio" | "gamma" |
                      "gamma_prime" | "separation", "range": [a, b], "steps": 101,
                      "task": "winding" | "spectrum"}],
      "output_dir": "out",                                  # optional
      "tolerances": {"tol_real": ..., "tol_match": ...}     # optional
    }

For preset ensembles the reservoir block is optional (the preset supplies
it); an explicit block overrides it.  Unknown keys are rejected anywhere.
Parsing failures raise ``ParseError`` with the line/column; schema and
physics failures raise ``ValidationError`` carrying every violation at
once, including the offending eigenvalue when a reservoir fails the
dissipativity certificate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeRate,
    NonDissipativeReservoir,
    ParseError,
    ValidationError,
)
from .spinmodel import (
    DEFAULT_OMEGA_EG,
    EnsembleConfig,
    ReservoirCoupling,
    preset_single_atom,
    preset_two_atom,
)
from .twophoton import ASYMPTOTIC_UNIT, RAW

SWEEP_PARAMETERS = ("gamma_ratio", "gamma", "gamma_prime", "separation")


@dataclass(frozen=True)
class PresetInfo:
    """Preset identity kept on the RunSpec so sweeps can rebuild the family."""

    kind: str
    gamma: float
    gamma_prime: float
    omega_eg: float

    @property
    def gamma_tot(self) -> float:
        return self.gamma + self.gamma_prime


@dataclass(frozen=True)
class SpectrumTask:
    kind = "spectrum"


@dataclass(frozen=True)
class TransmissionTask:
    kind = "transmission"
    k_span: Optional[tuple[float, float]] = None
    points: int = 2048
    mode: str = "markov"


@dataclass(frozen=True)
class WindingTask:
    kind = "winding"
    k_span: Optional[tuple[float, float]] = None
    points: int = 2048


@dataclass(frozen=True)
class BoundStatesTask:
    kind = "boundstates"
    z_span: Optional[tuple[float, float]] = None
    points: int = 2001


@dataclass(frozen=True)
class G2Task:
    kind = "g2"
    tau_span: tuple[float, float] = (0.0, 10.0)
    points: int = 201
    normalization: str = ASYMPTOTIC_UNIT


@dataclass(frozen=True)
class SweepTask:
    kind = "sweep"
    parameter: str = "gamma_ratio"
    sweep_range: tuple[float, float] = (0.0, 1.0)
    steps: int = 101
    observe: str = "winding"  # per-point task: "winding" (full) or "spectrum" (counts only)


@dataclass(frozen=True)
class RunSpec:
    """A validated run: physical scene, tasks, output policy, tolerances."""

    config: EnsembleConfig
    reservoir: ReservoirCoupling
    tasks: tuple
    output_dir: Optional[str]
    tol_real: Optional[float]
    tol_match: Optional[float]
    preset: Optional[PresetInfo]
    document: dict = field(repr=False)


class _Bag:
    """Violation collector so one pass reports every schema problem."""

    def __init__(self):
        self.items = []

    def add(self, path, message):
        self.items.append(f"{path}: {message}" if path else message)

    def raise_if_any(self):
        if self.items:
            raise ValidationError(self.items)


def _check_keys(obj, path, bag, allowed, required=()):
    if not isinstance(obj, dict):
        bag.add(path, f"expected an object, got {type(obj).__name__}")
        return False
    ok = True
    for key in obj:
        if key not in allowed:
            bag.add(path, f"unknown key {key!r} (allowed: {sorted(allowed)})")
            ok = False
    for key in required:
        if key not in obj:
            bag.add(path, f"missing required key {key!r}")
            ok = False
    return ok


def _number(obj, key, path, bag, default=None, minimum=None):
    if key not in obj:
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        bag.add(f"{path}.{key}", "expected a number")
        return default
    value = float(value)
    if not np.isfinite(value):
        bag.add(f"{path}.{key}", "must be finite")
        return default
    if minimum is not None and value < minimum:
        bag.add(f"{path}.{key}", f"must be >= {minimum}")
        return default
    return value


def _integer(obj, key, path, bag, default=None, minimum=None):
    if key not in obj:
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        bag.add(f"{path}.{key}", "expected an integer")
        return default
    if minimum is not None and value < minimum:
        bag.add(f"{path}.{key}", f"must be >= {minimum}")
        return default
    return value


def _span(obj, key, path, bag, default=None, required=False):
    if key not in obj:
        if required:
            bag.add(path, f"missing required key {key!r}")
        return default
    value = obj[key]
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        bag.add(f"{path}.{key}", "expected [min, max] numbers")
        return default
    lo, hi = float(value[0]), float(value[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        bag.add(f"{path}.{key}", "span must be finite and non-empty (min < max)")
        return default
    return (lo, hi)


def _complex(value, path, bag):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    bag.add(path, "expected a number or a [re, im] pair")
    return None


def _parse_ensemble(obj, bag):
    """Returns (config, preset_reservoir, preset_info); Nones on failure."""
    path = "ensemble"
    if not isinstance(obj, dict):
        bag.add(path, "expected an object")
        return None, None, None
    if "preset" in obj:
        if not _check_keys(
            obj, path, bag,
            allowed={"preset", "gamma", "gamma_prime", "ratio", "gamma_tot", "omega_eg"},
        ):
            return None, None, None
        kind = obj["preset"]
        builders = {"single_atom": preset_single_atom, "two_atom": preset_two_atom}
        if kind not in builders:
            bag.add(f"{path}.preset", f"unknown preset {kind!r} (choose from {sorted(builders)})")
            return None, None, None
        has_rates = "gamma" in obj or "gamma_prime" in obj
        has_ratio = "ratio" in obj
        if has_rates and has_ratio:
            bag.add(path, "give either gamma/gamma_prime or ratio, not both")
            return None, None, None
        omega = _number(obj, "omega_eg", path, bag, default=DEFAULT_OMEGA_EG)
        if has_ratio:
            ratio = _number(obj, "ratio", path, bag)
            gamma_tot = _number(obj, "gamma_tot", path, bag, default=1.0, minimum=0.0)
            if ratio is None or gamma_tot is None:
                return None, None, None
            gamma = ratio * gamma_tot
            gamma_prime = (1.0 - ratio) * gamma_tot
        else:
            gamma = _number(obj, "gamma", path, bag, default=0.5)
            gamma_prime = _number(obj, "gamma_prime", path, bag, default=0.5)
            if gamma is None or gamma_prime is None:
                return None, None, None
        try:
            config, reservoir = builders[kind](gamma, gamma_prime, omega_eg=omega)
        except (NegativeRate, ValueError) as exc:
            bag.add(path, str(exc))
            return None, None, None
        info = PresetInfo(kind=kind, gamma=gamma, gamma_prime=gamma_prime, omega_eg=omega)
        return config, reservoir, info
    # explicit emitter list
    if not _check_keys(obj, path, bag, allowed={"omega_eg", "atoms"}, required=("omega_eg", "atoms")):
        return None, None, None
    omega = _number(obj, "omega_eg", path, bag)
    atoms = obj["atoms"]
    if not isinstance(atoms, list) or not atoms:
        bag.add(f"{path}.atoms", "expected a non-empty list")
        return None, None, None
    positions, couplings = [], []
    ok = True
    for i, atom in enumerate(atoms):
        apath = f"{path}.atoms[{i}]"
        if not _check_keys(atom, apath, bag, allowed={"z", "coupling"}, required=("z", "coupling")):
            ok = False
            continue
        z = _number(atom, "z", apath, bag)
        v = _complex(atom.get("coupling"), f"{apath}.coupling", bag)
        if z is None or v is None:
            ok = False
            continue
        positions.append(z)
        couplings.append(v)
    if not ok or omega is None:
        return None, None, None
    try:
        config = EnsembleConfig(omega_eg=omega, positions=np.array(positions),
                                couplings=np.array(couplings))
    except ValueError as exc:
        bag.add(path, str(exc))
        return None, None, None
    return config, None, None


def _parse_reservoir(obj, n_emitters, bag):
    path = "reservoir"
    if not isinstance(obj, dict) or "mode" not in obj:
        bag.add(path, "expected an object with a 'mode' key")
        return None
    mode = obj["mode"]
    try:
        if mode == "independent":
            if not _check_keys(obj, path, bag, allowed={"mode", "gamma_prime"}, required=("gamma_prime",)):
                return None
            gp = obj["gamma_prime"]
            if isinstance(gp, (int, float)) and not isinstance(gp, bool):
                rates = [float(gp)] * n_emitters
            elif isinstance(gp, list) and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in gp
            ):
                rates = [float(v) for v in gp]
            else:
                bag.add(f"{path}.gamma_prime", "expected a number or list of numbers")
                return None
            if len(rates) != n_emitters:
                bag.add(f"{path}.gamma_prime", f"expected {n_emitters} rates, got {len(rates)}")
                return None
            return ReservoirCoupling(np.diag(-1j * np.asarray(rates)))
        if mode == "matrix":
            if not _check_keys(obj, path, bag, allowed={"mode", "k_prime"}, required=("k_prime",)):
                return None
            rows = obj["k_prime"]
            if not isinstance(rows, list) or len(rows) != n_emitters:
                bag.add(f"{path}.k_prime", f"expected {n_emitters} rows")
                return None
            mat = np.zeros((n_emitters, n_emitters), dtype=complex)
            ok = True
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != n_emitters:
                    bag.add(f"{path}.k_prime[{i}]", f"expected {n_emitters} entries")
                    ok = False
                    continue
                for j, cell in enumerate(row):
                    z = _complex(cell, f"{path}.k_prime[{i}][{j}]", bag)
                    if z is None:
                        ok = False
                    else:
                        mat[i, j] = z
            if not ok:
                return None
            return ReservoirCoupling(mat)
        if mode == "symmetric_pair":
            if not _check_keys(obj, path, bag, allowed={"mode", "gamma_prime"}, required=("gamma_prime",)):
                return None
            if n_emitters != 2:
                bag.add(path, "symmetric_pair reservoir needs exactly two emitters")
                return None
            gp = _number(obj, "gamma_prime", path, bag, minimum=0.0)
            if gp is None:
                return None
            return ReservoirCoupling(gp * np.array([[-1j, -1.0], [-1.0, -1j]]))
        bag.add(f"{path}.mode", f"unknown mode {mode!r}")
        return None
    except NonDissipativeReservoir as exc:
        bag.add(path, str(exc))
        return None


def build_task(obj, path, bag, *, n_emitters=None, preset=None):
    """Validate a task object and construct the typed task, or None."""
    if not isinstance(obj, dict) or "type" not in obj:
        bag.add(path, "expected an object with a 'type' key")
        return None
    kind = obj["type"]
    if kind == "spectrum":
        _check_keys(obj, path, bag, allowed={"type"})
        return SpectrumTask()
    if kind == "transmission":
        if not _check_keys(obj, path, bag, allowed={"type", "k_span", "points", "mode"}):
            return None
        span = _span(obj, "k_span", path, bag)
        points = _integer(obj, "points", path, bag, default=2048, minimum=2)
        mode = obj.get("mode", "markov")
        if mode not in ("markov", "exact"):
            bag.add(f"{path}.mode", f"expected 'markov' or 'exact', got {mode!r}")
            return None
        if points is None:
            return None
        return TransmissionTask(k_span=span, points=points, mode=mode)
    if kind == "winding":
        if not _check_keys(obj, path, bag, allowed={"type", "k_span", "points"}):
            return None
        span = _span(obj, "k_span", path, bag)
        points = _integer(obj, "points", path, bag, default=2048, minimum=2)
        if points is None:
            return None
        return WindingTask(k_span=span, points=points)
    if kind == "boundstates":
        if not _check_keys(obj, path, bag, allowed={"type", "z_span", "points"}):
            return None
        span = _span(obj, "z_span", path, bag)
        points = _integer(obj, "points", path, bag, default=2001, minimum=2)
        if points is None:
            return None
        return BoundStatesTask(z_span=span, points=points)
    if kind == "g2":
        if not _check_keys(obj, path, bag, allowed={"type", "tau_span", "points", "normalization"}):
            return None
        if n_emitters is not None and n_emitters != 1:
            bag.add(path, "the g2 closed form is available for a single emitter only")
            return None
        span = _span(obj, "tau_span", path, bag, default=(0.0, 10.0))
        points = _integer(obj, "points", path, bag, default=201, minimum=2)
        norm = obj.get("normalization", ASYMPTOTIC_UNIT)
        if norm not in (RAW, ASYMPTOTIC_UNIT):
            bag.add(f"{path}.normalization", f"expected '{ASYMPTOTIC_UNIT}' or '{RAW}'")
            return None
        if span is None or points is None:
            return None
        return G2Task(tau_span=span, points=points, normalization=norm)
    if kind == "sweep":
        if not _check_keys(obj, path, bag, allowed={"type", "parameter", "range", "steps", "task"},
                           required=("parameter", "range")):
            return None
        parameter = obj["parameter"]
        if parameter not in SWEEP_PARAMETERS:
            bag.add(f"{path}.parameter", f"expected one of {SWEEP_PARAMETERS}")
            return None
        if preset is None:
            bag.add(path, "sweeps need a preset ensemble (the parameter maps onto preset rates)")
            return None
        if parameter == "separation" and preset.kind != "two_atom":
            bag.add(path, "the separation parameter applies to the two_atom preset only")
            return None
        span = _span(obj, "range", path, bag, required=True)
        steps = _integer(obj, "steps", path, bag, default=101, minimum=2)
        observe = obj.get("task", "winding")
        if observe not in ("winding", "spectrum"):
            bag.add(f"{path}.task", "per-point task must be 'winding' or 'spectrum'")
            return None
        if span is None or steps is None:
            return None
        return SweepTask(parameter=parameter, sweep_range=span, steps=steps, observe=observe)
    bag.add(f"{path}.type", f"unknown task type {kind!r}")
    return None


def task_from_dict(obj, *, n_emitters=None, preset=None):
    """Validate a single task object, raising ``ValidationError`` on failure."""
    bag = _Bag()
    task = build_task(obj, "task", bag, n_emitters=n_emitters, preset=preset)
    bag.raise_if_any()
    return task


def load_runspec(document) -> RunSpec:
    """Parse and validate a run document (JSON text or an already-parsed dict).

    Raises ``ParseError`` for malformed JSON and ``ValidationError`` listing
    every schema or physics violation found.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    elif isinstance(document, dict):
        doc = document
    else:
        raise ParseError(f"expected JSON text or a dict, got {type(document).__name__}")

    bag = _Bag()
    _check_keys(doc, "", bag,
                allowed={"ensemble", "reservoir", "tasks", "output_dir", "tolerances"},
                required=("ensemble",))
    config = reservoir = preset = None
    if isinstance(doc.get("ensemble"), dict):
        config, preset_reservoir, preset = _parse_ensemble(doc["ensemble"], bag)
        if "reservoir" in doc:
            if config is not None:
                explicit = _parse_reservoir(doc["reservoir"], config.n_emitters, bag)
                if explicit is not None:
                    try:
                        if explicit.n_emitters != config.n_emitters:
                            raise DimensionMismatch("reservoir size mismatch")
                        reservoir = explicit
                    except DimensionMismatch as exc:
                        bag.add("reservoir", str(exc))
        else:
            reservoir = preset_reservoir
            if reservoir is None and config is not None:
                bag.add("reservoir", "required when the ensemble is not a preset")
    elif "ensemble" in doc:
        bag.add("ensemble", "expected an object")

    tasks = []
    raw_tasks = doc.get("tasks", [])
    if not isinstance(raw_tasks, list):
        bag.add("tasks", "expected a list")
    else:
        n = config.n_emitters if config is not None else None
        for i, obj in enumerate(raw_tasks):
            task = build_task(obj, f"tasks[{i}]", bag, n_emitters=n, preset=preset)
            if task is not None:
                tasks.append(task)

    tol_real = tol_match = None
    if "tolerances" in doc:
        tpath = "tolerances"
        if _check_keys(doc["tolerances"], tpath, bag, allowed={"tol_real", "tol_match"}):
            tol_real = _number(doc["tolerances"], "tol_real", tpath, bag, minimum=0.0)
            tol_match = _number(doc["tolerances"], "tol_match", tpath, bag, minimum=0.0)

    output_dir = doc.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        bag.add("output_dir", "expected a string")
        output_dir = None

    bag.raise_if_any()
    return RunSpec(
        config=config,
        reservoir=reservoir,
        tasks=tuple(tasks),
        output_dir=output_dir,
        tol_real=tol_real,
        tol_match=tol_match,
        preset=preset,
        document=doc,
    )
