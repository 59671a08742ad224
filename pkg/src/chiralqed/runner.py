"""Task orchestration: spectra, traces, sweeps and bundled reference scenarios.

``run`` executes the tasks of a RunSpec in order and emits deterministic CSV
artifacts plus a manifest (configuration hash, library version, per-task
status and file digests).  Per-task failures are collected, not fatal: the
manifest records them and the CLI maps them to exit code 2.

``sweep`` scans a preset parameter, records the scalar observables per point
(bound-state count, winding number, minimum |t| over the spectral window)
and automatically refines every detected bound-state-count change by
bisection, appending the threshold as an extra row.

``reproduce`` runs three canned scenarios ("fig3a", "fig3b", "figS1"):
single-emitter transmission trajectories across the bound-state threshold,
the two-emitter trajectory family with windings 0/1/2, and the g2 heatmap
with its divergent ridge.

The orchestrator owns all mutable state; numerical work happens in pure
vectorized calls and files are written by a single writer in task order.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import emit
from .errors import (
    ChiralQEDError,
    GridRefinementError,
    NoBracket,
    PoleOnGridWarning,
    ValidationError,
    ZeroOnContour,
)
from .runspec import (
    BoundStatesTask,
    G2Task,
    PresetInfo,
    RunSpec,
    SpectrumTask,
    SWEEP_PARAMETERS,
    SweepTask,
    TransmissionTask,
    WindingTask,
)
from .scattering import (
    _required_span,
    bound_wavefunction,
    sample_transmission,
    transmission_det,
    winding_number,
)
from .spectral import BOUND, bound_state_threshold, classify_model
from .spinmodel import (
    DEFAULT_OMEGA_EG,
    EnsembleConfig,
    ReservoirCoupling,
    build_spin_model,
    preset_family,
    preset_single_atom,
    preset_two_atom,
)
from .twophoton import ASYMPTOTIC_UNIT, g2
from .version import __version__

ENV_OUTDIR = "CHIRALQED_OUTDIR"

RECIPE_RATIOS = {"fig3a": (1.0, 0.5, 0.2), "fig3b": (0.2, 0.65, 0.75)}
RECIPE_KINDS = {"fig3a": "single_atom", "fig3b": "two_atom"}
RECIPES = ("fig3a", "fig3b", "figS1")


def _resolve_out_dir(explicit, spec_dir) -> Path:
    return Path(explicit or spec_dir or os.environ.get(ENV_OUTDIR) or "chiralqed-out")


def _task_as_dict(task) -> dict:
    out = {"type": task.kind}
    for name, value in vars(task).items():
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def _emit_file(out: Path, name: str, text: str, files: dict) -> None:
    emit.write_text(out / name, text)
    files[name] = emit.sha256_text(text)


def _write_manifest(out: Path, hash_source, reports, files) -> dict:
    manifest = {
        "version": __version__,
        "config_hash": emit.config_hash(hash_source, __version__),
        "tasks": reports,
        "files": {k: files[k] for k in sorted(files)},
    }
    emit.write_text(out / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest


def _classification_csv(bound_set, n_emitters: int) -> str:
    header = ["re_energy", "im_energy", "class"]
    for j in range(n_emitters):
        header += [f"re_right_{j}", f"im_right_{j}"]
    rows = []
    for entry in sorted(bound_set.entries, key=lambda e: (e.energy.real, e.energy.imag)):
        row = [emit.fmt(entry.energy.real), emit.fmt(entry.energy.imag), entry.label]
        for amp in entry.right_amplitudes:
            row += [emit.fmt(amp.real), emit.fmt(amp.imag)]
        rows.append(row)
    return emit.csv_text(header, rows)


def _trace_csv(trace) -> str:
    header = ["k", "re_t", "im_t", "abs_t", "phase_unwrapped"]
    rows = [
        [emit.fmt(k), emit.fmt(t.real), emit.fmt(t.imag), emit.fmt(abs(t)), emit.fmt(p)]
        for k, t, p in zip(trace.k_grid, trace.t_values, trace.unwrapped_phase)
    ]
    return emit.csv_text(header, rows)


def _trajectory_csv(t_values) -> str:
    header = ["re_t", "im_t"]
    rows = [[emit.fmt(t.real), emit.fmt(t.imag)] for t in t_values]
    return emit.csv_text(header, rows)


def _wavefunction_csv(sample) -> str:
    header = ["z", "re_phi", "im_phi", "abs_phi"]
    rows = [
        [emit.fmt(z), emit.fmt(p.real), emit.fmt(p.imag), emit.fmt(abs(p))]
        for z, p in zip(sample.z_grid, sample.photon_amplitude)
    ]
    return emit.csv_text(header, rows)


def _min_abs_t(model) -> Optional[float]:
    span = _required_span(model)
    ks = np.linspace(span[0], span[1], 2048)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PoleOnGridWarning)
        t = transmission_det(model, ks)
    finite = np.isfinite(t)
    return float(np.abs(t[finite]).min()) if finite.any() else None


def _run_task(model, spec: RunSpec, task, out: Path, prefix: str):
    files: dict[str, str] = {}
    if isinstance(task, SpectrumTask):
        bound_set = classify_model(model, spec.tol_real, spec.tol_match)
        _emit_file(out, f"{prefix}.csv", _classification_csv(bound_set, model.n_emitters), files)
        poles = np.sort_complex(np.linalg.eigvals(model.h_eff))
        pole_rows = [[emit.fmt(p.real), emit.fmt(p.imag)] for p in poles]
        _emit_file(out, f"{prefix}_poles.csv", emit.csv_text(["re", "im"], pole_rows), files)
        for name, matrix in (
            ("h_bound", model.h_bound),
            ("h_eff", model.h_eff),
            ("coupling", model.coupling),
        ):
            _emit_file(out, f"{prefix}_{name}.csv", emit.matrix_csv_text(matrix), files)
        detail = {
            "num_bound": bound_set.num_bound,
            "num_zero": bound_set.num_zero,
            "num_bic": bound_set.num_bic,
            "bound_state_count": bound_set.bound_state_count,
        }
        return files, detail
    if isinstance(task, TransmissionTask):
        trace = sample_transmission(model, task.k_span, task.points, task.mode)
        _emit_file(out, f"{prefix}.csv", _trace_csv(trace), files)
        return files, {
            "mode": trace.mode,
            "points": int(trace.k_grid.size),
            "winding": trace.winding,
            "winding_residual": trace.winding_residual,
        }
    if isinstance(task, WindingTask):
        trace = winding_number(model, task.k_span, task.points, spec.tol_real, spec.tol_match)
        bound_set = classify_model(model, spec.tol_real, spec.tol_match)
        _emit_file(out, f"{prefix}.csv", _trace_csv(trace), files)
        _emit_file(out, f"{prefix}_trajectory.csv", _trajectory_csv(trace.t_values), files)
        n_b = bound_set.bound_state_count
        return files, {
            "winding": trace.winding,
            "winding_residual": trace.winding_residual,
            "num_emitters": model.n_emitters,
            "bound_state_count": n_b,
            "levinson_consistent": trace.winding == model.n_emitters - n_b,
        }
    if isinstance(task, BoundStatesTask):
        bound_set = classify_model(model, spec.tol_real, spec.tol_match)
        _emit_file(out, f"{prefix}_states.csv", _classification_csv(bound_set, model.n_emitters), files)
        bound_entries = sorted(
            bound_set.by_label(BOUND), key=lambda e: (e.energy.real, e.energy.imag)
        )
        z_lo_atoms = float(model.config.positions.min())
        z_hi_atoms = float(model.config.positions.max())
        for idx, entry in enumerate(bound_entries):
            width = 1.0 / abs(entry.energy.imag)
            for side in ("right", "left"):
                if task.z_span is not None:
                    zs = np.linspace(task.z_span[0], task.z_span[1], task.points)
                elif side == "right":
                    zs = np.linspace(z_lo_atoms - 16.0 * width, z_hi_atoms + width, task.points)
                else:
                    zs = np.linspace(z_lo_atoms - width, z_hi_atoms + 16.0 * width, task.points)
                sample = bound_wavefunction(model, entry, side=side, z_grid=zs)
                _emit_file(out, f"{prefix}_state{idx:02d}_{side}.csv", _wavefunction_csv(sample), files)
        return files, {"num_bound": len(bound_entries)}
    if isinstance(task, G2Task):
        if model.n_emitters != 1:
            raise ValidationError(["g2 task needs a single emitter"])
        k_prime = complex(model.reservoir.matrix[0, 0])
        if abs(k_prime.real) > 1e-12 * (abs(k_prime) + 1.0):
            raise ValidationError(
                ["g2 closed form needs a pure-decay reservoir K' = -i*gamma_prime"]
            )
        gamma = float(model.config.channel_rates[0])
        gamma_prime = -k_prime.imag
        taus = np.linspace(task.tau_span[0], task.tau_span[1], task.points)
        corr = g2(taus, gamma, gamma_prime, model.omega_eg, task.normalization)
        header = ["tau", "g2", "abs_psi2_sq"]
        rows = [
            [emit.fmt(tau), emit.fmt(val), emit.fmt(abs(psi) ** 2)]
            for tau, val, psi in zip(corr.tau_grid, corr.g2_values, corr.psi2_values)
        ]
        _emit_file(out, f"{prefix}.csv", emit.csv_text(header, rows), files)
        return files, {"normalization": corr.normalization, "divergent": corr.divergent}
    if isinstance(task, SweepTask):
        result = sweep(spec, task.parameter, task.sweep_range, task.steps, task.observe)
        _emit_file(out, f"{prefix}.csv", result.to_csv(), files)
        return files, {
            "parameter": result.parameter,
            "points": len(result.rows),
            "thresholds": [r.value for r in result.rows if r.is_threshold],
        }
    raise ValidationError([f"unhandled task type {type(task).__name__}"])


def run(spec: RunSpec, out_dir=None) -> dict:
    """Execute every task of the spec; emit artifacts and the manifest.

    Re-running an identical spec yields byte-identical files: floats are
    written in shortest round-trip form, rows in fixed order, and neither
    timestamps nor absolute paths enter any artifact.  The manifest hash
    covers the ensemble, reservoir, effective tasks and tolerances (not the
    output directory, which does not affect numbers).
    """
    out = _resolve_out_dir(out_dir, spec.output_dir)
    model = build_spin_model(spec.config, spec.reservoir)
    files: dict[str, str] = {}
    reports = []
    for i, task in enumerate(spec.tasks):
        prefix = f"{i:02d}_{task.kind}"
        try:
            emitted, detail = _run_task(model, spec, task, out, prefix)
            files.update(emitted)
            reports.append(
                {"task": task.kind, "status": "ok", "files": sorted(emitted), "detail": detail}
            )
        except ChiralQEDError as exc:
            reports.append(
                {
                    "task": task.kind,
                    "status": "error",
                    "error": f"{type(exc).__name__}: {exc}",
                    "files": [],
                }
            )
    hash_source = {
        "ensemble": spec.document.get("ensemble"),
        "reservoir": spec.document.get("reservoir"),
        "tasks": [_task_as_dict(t) for t in spec.tasks],
        "tolerances": [spec.tol_real, spec.tol_match],
    }
    return _write_manifest(out, hash_source, reports, files)


# ---------------------------------------------------------------------------
# parameter sweeps


@dataclass(frozen=True)
class SweepRow:
    value: float
    num_bound: Optional[int]
    winding: Optional[int]
    min_abs_t: Optional[float]
    is_threshold: bool
    error: Optional[str]


@dataclass(frozen=True)
class SweepResult:
    """Scalar observables along a parameter scan, thresholds refined.

    Rows are ordered by parameter value; the bound-state count column is
    piecewise constant with changes only at the inserted threshold rows.
    """

    parameter: str
    rows: tuple[SweepRow, ...]
    provenance: dict

    def to_csv(self) -> str:
        header = ["value", "num_bound", "winding", "min_abs_t", "is_threshold", "error"]
        out_rows = []
        for r in self.rows:
            out_rows.append(
                [
                    emit.fmt(r.value),
                    "" if r.num_bound is None else emit.fmt_int(r.num_bound),
                    "" if r.winding is None else emit.fmt_int(r.winding),
                    "" if r.min_abs_t is None else emit.fmt(r.min_abs_t),
                    "true" if r.is_threshold else "false",
                    "" if r.error is None else r.error.replace(",", ";").replace("\n", " "),
                ]
            )
        return emit.csv_text(header, out_rows)


def _sweep_family(preset: PresetInfo, parameter: str):
    builders = {"single_atom": preset_single_atom, "two_atom": preset_two_atom}
    build = builders[preset.kind]
    gamma_tot = preset.gamma_tot

    if parameter == "gamma_ratio":
        return lambda v: build_spin_model(
            *build(v * gamma_tot, (1.0 - v) * gamma_tot, omega_eg=preset.omega_eg)
        )
    if parameter == "gamma":
        return lambda v: build_spin_model(*build(v, preset.gamma_prime, omega_eg=preset.omega_eg))
    if parameter == "gamma_prime":
        return lambda v: build_spin_model(*build(preset.gamma, v, omega_eg=preset.omega_eg))
    if parameter == "separation":

        def family(v):
            if v <= 0:
                raise ValidationError(["separation must be positive"])
            amp = np.sqrt(2.0 * preset.gamma)
            config = EnsembleConfig(
                omega_eg=preset.omega_eg,
                positions=np.array([0.0, -float(v)]),
                couplings=np.array([amp, amp], dtype=complex),
            )
            reservoir = ReservoirCoupling(
                preset.gamma_prime * np.array([[-1j, -1.0], [-1.0, -1j]])
            )
            return build_spin_model(config, reservoir)

        return family
    raise ValidationError([f"unknown sweep parameter {parameter!r}"])


def _observe(family, value, spec: RunSpec, observe="winding", is_threshold=False) -> SweepRow:
    try:
        model = family(float(value))
    except ChiralQEDError as exc:
        return SweepRow(float(value), None, None, None, is_threshold,
                        f"{type(exc).__name__}: {exc}")
    bound_set = classify_model(model, spec.tol_real, spec.tol_match)
    winding = None
    min_abs_t = None
    error = None
    if observe == "winding":
        try:
            trace = winding_number(model, tol_real=spec.tol_real, tol_match=spec.tol_match)
            winding = trace.winding
        except (ZeroOnContour, GridRefinementError) as exc:
            error = f"{type(exc).__name__}: {exc}"
        min_abs_t = _min_abs_t(model)
    return SweepRow(
        value=float(value),
        num_bound=bound_set.bound_state_count,
        winding=winding,
        min_abs_t=min_abs_t,
        is_threshold=is_threshold,
        error=error,
    )


def sweep(spec: RunSpec, parameter: str, sweep_range, steps: int, observe: str = "winding") -> SweepResult:
    """Scan a preset parameter; refine every bound-state-count change.

    ``observe`` selects the per-point task: "winding" records the full
    scalar observables (bound count, winding, min |t|), "spectrum" records
    the bound count only.  Per-point failures are kept in the row's error
    column and the scan continues.  Between adjacent points whose
    bound-state counts differ, the crossing is bisected to 1e-9 and
    inserted as a threshold row (ordering by parameter value is preserved).
    """
    if spec.preset is None:
        raise ValidationError(["sweeps need a preset ensemble"])
    if parameter not in SWEEP_PARAMETERS:
        raise ValidationError([f"unknown sweep parameter {parameter!r}"])
    if parameter == "separation" and spec.preset.kind != "two_atom":
        raise ValidationError(["the separation parameter applies to the two_atom preset only"])
    if observe not in ("winding", "spectrum"):
        raise ValidationError(["per-point task must be 'winding' or 'spectrum'"])
    lo, hi = float(sweep_range[0]), float(sweep_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValidationError(["sweep range must be finite and non-empty (min < max)"])
    if steps < 2:
        raise ValidationError(["sweep needs at least 2 steps"])

    family = _sweep_family(spec.preset, parameter)
    values = np.linspace(lo, hi, int(steps))
    rows = [_observe(family, v, spec, observe) for v in values]

    extras = []
    for left, right in zip(rows[:-1], rows[1:]):
        if left.num_bound is None or right.num_bound is None:
            continue
        if left.num_bound == right.num_bound:
            continue
        try:
            # strict axis-crossing bisection; the classify band would bias it
            found = bound_state_threshold(family, left.value, right.value, xtol=1e-9)
        except (NoBracket, ChiralQEDError):
            continue
        extras.append(_observe(family, found.value, spec, observe, is_threshold=True))

    all_rows = sorted(rows + extras, key=lambda r: r.value)
    provenance = {
        "config_hash": emit.config_hash(
            {
                "ensemble": spec.document.get("ensemble"),
                "reservoir": spec.document.get("reservoir"),
                "sweep": {"parameter": parameter, "range": [lo, hi], "steps": int(steps)},
                "tolerances": [spec.tol_real, spec.tol_match],
            },
            __version__,
        ),
        "version": __version__,
        "parameter": parameter,
        "range": [lo, hi],
        "steps": int(steps),
        "tolerances": [spec.tol_real, spec.tol_match],
    }
    return SweepResult(parameter=parameter, rows=tuple(all_rows), provenance=provenance)


# ---------------------------------------------------------------------------
# bundled reference scenarios


def _reproduce_trajectories(name: str, out: Path) -> dict:
    kind = RECIPE_KINDS[name]
    ratios = RECIPE_RATIOS[name]
    family = preset_family(kind, gamma_tot=1.0, omega_eg=DEFAULT_OMEGA_EG)
    files: dict[str, str] = {}
    summary_rows = []
    reports = []
    for ratio in ratios:
        model = family(ratio)
        bound_set = classify_model(model)
        flagged = False
        try:
            trace = winding_number(model)
            winding = trace.winding
            t_values = trace.t_values
        except ZeroOnContour:
            # exactly at a threshold the trace passes through the origin and
            # the measured winding is undefined; report the classifier-side
            # value N - N_B and flag the case
            flagged = True
            winding = model.n_emitters - bound_set.bound_state_count
            span = _required_span(model)
            ks = np.linspace(span[0], span[1], 4097)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PoleOnGridWarning)
                t_values = transmission_det(model, ks)
        fname = f"{name}_ratio_{emit.fmt(ratio)}_trajectory.csv"
        _emit_file(out, fname, _trajectory_csv(t_values), files)
        finite = np.isfinite(t_values)
        min_abs = float(np.abs(t_values[finite]).min())
        summary_rows.append(
            [
                emit.fmt(ratio),
                emit.fmt_int(winding),
                emit.fmt_int(bound_set.bound_state_count),
                "true" if flagged else "false",
                emit.fmt(min_abs),
            ]
        )
        reports.append(
            {
                "task": f"{name}_ratio_{emit.fmt(ratio)}",
                "status": "ok",
                "files": [fname],
                "detail": {
                    "winding": winding,
                    "bound_state_count": bound_set.bound_state_count,
                    "zero_on_contour": flagged,
                },
            }
        )
    summary = emit.csv_text(
        ["ratio", "winding", "num_bound", "zero_on_contour", "min_abs_t"], summary_rows
    )
    _emit_file(out, f"{name}_summary.csv", summary, files)
    hash_source = {
        "recipe": name,
        "kind": kind,
        "ratios": list(ratios),
        "gamma_tot": 1.0,
        "omega_eg": DEFAULT_OMEGA_EG,
    }
    return _write_manifest(out, hash_source, reports, files)


def _reproduce_heatmap(out: Path) -> dict:
    taus = np.linspace(0.0, 10.0, 201)
    header = ["ratio"] + [emit.fmt(t) for t in taus]
    rows = []
    divergent_ratios = []
    for i in range(101):
        ratio = i / 100.0
        corr = g2(taus, ratio, 1.0 - ratio, omega_eg=0.0, normalization=ASYMPTOTIC_UNIT)
        if corr.divergent:
            divergent_ratios.append(ratio)
        with np.errstate(divide="ignore"):
            values = np.log10(corr.g2_values)
        rows.append([emit.fmt(ratio)] + [emit.fmt(v) for v in values])
    files: dict[str, str] = {}
    _emit_file(out, "figS1_heatmap.csv", emit.csv_text(header, rows), files)
    reports = [
        {
            "task": "figS1_heatmap",
            "status": "ok",
            "files": ["figS1_heatmap.csv"],
            "detail": {"divergent_ratios": divergent_ratios, "normalization": ASYMPTOTIC_UNIT},
        }
    ]
    hash_source = {"recipe": "figS1", "gamma_tot": 1.0, "tau_max": 10.0, "tau_points": 201}
    return _write_manifest(out, hash_source, reports, files)


def reproduce(name: str, out_dir=None) -> dict:
    """Run a bundled scenario by name ("fig3a", "fig3b" or "figS1")."""
    if name not in RECIPES:
        raise ValidationError([f"unknown recipe {name!r} (choose from {RECIPES})"])
    out = _resolve_out_dir(out_dir, None)
    if name == "figS1":
        return _reproduce_heatmap(out)
    return _reproduce_trajectories(name, out)
