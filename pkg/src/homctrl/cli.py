"""Batch experiment runner: scenario configs in, CSV/SVG/report out.

Five canned experiments cover the reference tracking scenario, the
convergence-class sweep over the homogeneity degree, the noise-robustness
sweep, a chart-flip demonstration, and a generic impulsive linear run.  Every
artifact is deterministic for a given configuration: fixed-step integration,
counter-based noise, 17-significant-digit CSV floats, and hand-written SVG.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .attitude import (
    BodyState,
    InertiaSpec,
    NoiseSpec,
    TrajectorySpec,
    desired_kinematics,
    iss_sweep,
    simulate_tracking,
)
from .homnorm import hom_norm
from .impulsive import (
    JumpSpec,
    SimRecord,
    measure_settling,
    settling_estimate,
    simulate_impulsive,
)
from .so3 import exp_so3
from .synthesis import (
    GainSet,
    PlantMatrices,
    dilation_generator,
    solve_generator_equations,
    synthesize_gains,
    validate_design,
)

EXPERIMENT_IDS = ("paper", "mu-sweep", "iss-noise", "jump-demo", "impulsive-generic")

# Externally computed design for the reference scenario (convex-solver
# output printed to 3-4 digits); audited against the closed form in reports.
_REF_X = np.kron(1e-2 * np.array([[0.29, -4.31], [-4.31, 132.08]]), np.eye(3))
_REF_Y = np.kron(np.array([[-0.2432, -13.2083]]), np.eye(3))
_REF_K = np.kron(np.array([[-459.6206, -25.0]]), np.eye(3))

_REFERENCE_SCENARIO = {
    "inertia_kgm2": [1.0e-2, 8.2e-3, 1.48e-2],
    "mu": -0.5,
    "rho": 10.0,
    "design_a": 0.0029,
    "design_c": 1.3208,
    "trajectory_coeffs_rad": [[0.0, 1.5], [0.0, -1.0, 0.1], [0.0, 1.0, 0.1]],
    "theta0_rad": [-0.5 * math.pi, 0.0, 0.0],
    "omega0_rads": [30.0, 0.0, 0.0],
    "dt_s": 1e-4,
    "horizon_s": 2.0,
    "settle_threshold": 1e-3,
    "noise": {"measurement_amplitude": 0.0, "disturbance_amplitude_rads2": 0.0, "seed": 0},
}

_DEFAULT_SCENARIOS = {
    "paper": _REFERENCE_SCENARIO,
    "jump-demo": {**_REFERENCE_SCENARIO, "horizon_s": 0.5},
    "iss-noise": {
        **_REFERENCE_SCENARIO,
        "theta0_rad": [0.4, -0.3, 0.2],
        "omega0_rads": None,  # match the reference rate at t = 0
        "horizon_s": 1.0,
        "amplitudes": [0.0, 1e-3, 1e-2, 1e-1],
        "noise_channel": "measurement",
        "noise_seed": 7,
    },
    "mu-sweep": {
        "mu_values": [-0.5, 0.0, 0.5],
        "rho": 10.0,
        "design_a": None,
        "design_c": None,
        "x0": [0.5, -0.3, 0.2, 0.0, 0.0, 0.0],
        "jump_radius": math.pi,
        "dt_s": 1e-4,
        "horizons_s": {"-0.5": 0.6, "0.0": 1.2, "0.5": 1.5},
        "target_radius": 0.1,
        "settle_threshold": 1e-3,
    },
    "impulsive-generic": {
        "n": 3,
        "mu": -0.5,
        "rho": 10.0,
        "design_a": None,
        "design_c": None,
        "jump_radius": math.pi,
        "x0": [2.8, 0.0, 0.0, 3.0, 0.0, 0.0],
        "dt_s": 1e-4,
        "horizon_s": 1.0,
        "settle_threshold": 1e-3,
    },
}


@dataclass
class ExperimentConfig:
    """Resolved invocation of one canned experiment."""

    experiment: str
    outdir: Path
    scenario: dict = field(default_factory=dict)
    emit_plots: bool = True
    dt: float | None = None
    horizon: float | None = None
    seed: int | None = None

    def validate(self) -> None:
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(
                f"unknown experiment id {self.experiment!r}; "
                f"choose from {', '.join(EXPERIMENT_IDS)}"
            )
        if self.dt is not None and self.dt <= 0.0:
            raise ValueError("dt override must be positive")
        if self.horizon is not None and self.horizon <= 0.0:
            raise ValueError("horizon override must be positive")

    def resolved_scenario(self) -> dict:
        base = json.loads(json.dumps(_DEFAULT_SCENARIOS[self.experiment]))
        base.update(self.scenario)
        if self.dt is not None:
            base["dt_s"] = self.dt
        if self.horizon is not None:
            base["horizon_s"] = self.horizon
        if self.seed is not None:
            if "noise" in base:
                base["noise"]["seed"] = self.seed
            base["noise_seed"] = self.seed
        return base


@dataclass
class RunReport:
    """Summary of one experiment run; serialized to report.json."""

    experiment: str
    scenario: dict
    gains: dict
    settling_estimate: float | None
    settling_measured: float | None
    jump_count: int
    max_lyapunov_increase: float
    checks: dict
    manifest: dict
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        def default(obj):
            if isinstance(obj, np.ndarray):
                return obj.tolist()
            if isinstance(obj, (np.floating, np.integer)):
                return obj.item()
            if isinstance(obj, Path):
                return str(obj)
            raise TypeError(f"cannot serialize {type(obj)}")

        return json.dumps(asdict(self), indent=2, default=default)


def emit_csv(record: SimRecord, path: Path) -> Path:
    """Write the record with its fixed column layout; floats round-trip exactly."""
    path = Path(path)
    cols = record.columns()
    names = [name for name, _ in cols]
    arrays = [arr for _, arr in cols]
    n_rows = len(record.t)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            fh.write(",".join(format(float(a[i]), ".17g") for a in arrays) + "\n")
    return path


def read_csv(path: Path) -> SimRecord:
    """Re-parse an emitted CSV into a SimRecord (inverse of emit_csv)."""
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.strip().split(",")] for line in fh if line.strip()]
    data = {name: np.array([row[i] for row in rows]) for i, name in enumerate(header)}
    kind = "attitude" if "theta_e_1" in header else "impulsive"
    if kind == "attitude":
        x = np.column_stack([data[f"theta_e_{i}"] for i in (1, 2, 3)]
                            + [data[f"thetadot_e_{i}"] for i in (1, 2, 3)])
        extras = {key: np.column_stack([data[f"{key}_{i}"] for i in (1, 2, 3)])
                  for key in ("omega", "omega_d", "M")}
        flag = data["jump_flag"]
    else:
        n = sum(1 for name in header if name.startswith("x_"))
        x = np.column_stack([data[f"x_{i + 1}"] for i in range(n)]) if rows else np.zeros((0, n))
        extras = {}
        flag = data["event_flag"]
    rec = SimRecord(t=data["t"], x=x, homnorm=data["homnorm"], jump_flag=flag,
                    events=[], extras=extras, kind=kind)
    from .impulsive import JumpEvent

    for i in np.flatnonzero(flag == 1.0):
        i = int(i)
        x_minus, x_plus = rec.x[i - 1], rec.x[i]
        if kind == "attitude":
            mirrored = np.concatenate((-x_minus[:3], x_minus[3:]))
            mismatch = float(np.linalg.norm(mirrored - x_plus))
        else:
            mismatch = 0.0
        rec.events.append(JumpEvent(
            t=float(rec.t[i]), x_minus=x_minus.copy(), x_plus=x_plus.copy(),
            norm_minus=float(rec.homnorm[i - 1]), norm_plus=float(rec.homnorm[i]),
            reset_mismatch=mismatch,
        ))
    return rec


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
_LOG_FLOOR = 1e-16


def emit_plot(record: SimRecord, channels, path: Path, log10: bool = False,
              title: str | None = None, max_points: int = 2000) -> Path:
    """Line plot of the named record columns as a standalone SVG.

    ``log10`` plots the decimal logarithm of the magnitudes (floored at
    1e-16), which is the useful view for norm channels.  Vertical dashed
    markers indicate event times.  Long records are strided down to at most
    ``max_points`` vertices per polyline.
    """
    if len(record.t) == 0:
        raise ValueError("cannot plot an empty record")
    path = Path(path)
    t = record.t
    stride = max(1, int(math.ceil(len(t) / max_points)))
    idx = np.arange(0, len(t), stride)
    if idx[-1] != len(t) - 1:
        idx = np.append(idx, len(t) - 1)
    tt = t[idx]

    series = []
    for ci, name in enumerate(channels):
        vals = record.column(name)[idx]
        if log10:
            vals = np.log10(np.maximum(np.abs(vals), _LOG_FLOOR))
        series.append((name, vals, _PALETTE[ci % len(_PALETTE)]))

    W, H, ML, MR, MT, MB = 860, 460, 70, 20, 34, 44
    t_lo, t_hi = float(tt[0]), float(tt[-1])
    if t_hi <= t_lo:
        t_hi = t_lo + 1.0
    v_lo = min(float(np.min(v)) for _, v, _ in series)
    v_hi = max(float(np.max(v)) for _, v, _ in series)
    if v_hi <= v_lo:
        v_hi = v_lo + 1.0
    pad = 0.05 * (v_hi - v_lo)
    v_lo, v_hi = v_lo - pad, v_hi + pad

    def sx(v: float) -> float:
        return ML + (v - t_lo) / (t_hi - t_lo) * (W - ML - MR)

    def sy(v: float) -> float:
        return H - MB - (v - v_lo) / (v_hi - v_lo) * (H - MT - MB)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" '
        'fill="none" stroke="#444444" stroke-width="1"/>',
    ]
    if title:
        out.append(f'<text x="{ML}" y="22" font-family="monospace" font-size="14">'
                   f'{title}</text>')
    out.append(f'<text x="{ML}" y="{H - 10}" font-family="monospace" font-size="12">'
               f't = {t_lo:.6g}</text>')
    out.append(f'<text x="{W - MR - 120}" y="{H - 10}" font-family="monospace" '
               f'font-size="12">t = {t_hi:.6g}</text>')
    out.append(f'<text x="4" y="{sy(v_lo):.1f}" font-family="monospace" font-size="12">'
               f'{v_lo:.4g}</text>')
    out.append(f'<text x="4" y="{sy(v_hi) + 10:.1f}" font-family="monospace" '
               f'font-size="12">{v_hi:.4g}</text>')
    for ev in record.events:
        x = sx(ev.t)
        out.append(f'<line x1="{x:.2f}" y1="{MT}" x2="{x:.2f}" y2="{H - MB}" '
                   'stroke="#999999" stroke-width="1" stroke-dasharray="4,3"/>')
    for li, (name, vals, color) in enumerate(series):
        pts = " ".join(f"{sx(float(a)):.2f},{sy(float(b)):.2f}" for a, b in zip(tt, vals))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="1.3"/>')
        out.append(f'<text x="{W - MR - 150}" y="{MT + 16 + 14 * li}" '
                   f'font-family="monospace" font-size="12" fill="{color}">{name}</text>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _gains_summary(gains: GainSet, plant: PlantMatrices) -> dict:
    report = validate_design(gains, plant)
    return {
        "mu": gains.mu,
        "rho": gains.rho,
        "K": gains.K.tolist(),
        "design_residual_rel": report.design_residual_rel,
        "generator_residual": report.generator_residual,
        "min_eig_X": report.min_eig_X,
        "min_eig_GX": report.min_eig_GX,
        "min_eig_monotone": report.min_eig_monotone,
        "gain_mismatch": report.gain_mismatch,
    }


def _max_increase(rec: SimRecord) -> float:
    if len(rec.homnorm) < 2:
        return 0.0
    return max(0.0, float(np.max(np.diff(rec.homnorm))))


def reference_design() -> GainSet:
    """The externally solved reference gains, loaded verbatim for auditing."""
    plant = PlantMatrices.double_integrator(3)
    G0, _ = solve_generator_equations(plant)
    return GainSet(mu=-0.5, rho=10.0, G=dilation_generator(G0, -0.5),
                   P=np.linalg.inv(_REF_X), K0=np.zeros((3, 6)), K=_REF_K,
                   X=_REF_X, Y=_REF_Y)


def _attitude_setup(sc: dict):
    inertia_raw = np.asarray(sc["inertia_kgm2"], dtype=float)
    inertia = (InertiaSpec.diagonal(inertia_raw) if inertia_raw.ndim == 1
               else InertiaSpec(J=inertia_raw))
    traj = TrajectorySpec(coeffs=sc["trajectory_coeffs_rad"])
    plant = PlantMatrices.double_integrator(3)
    gains = synthesize_gains(plant, sc["mu"], sc["rho"],
                             a=sc.get("design_a"), c=sc.get("design_c"))
    theta0 = np.asarray(sc["theta0_rad"], dtype=float)
    omega0 = sc.get("omega0_rads")
    if omega0 is None:
        _, wd0, _ = desired_kinematics(traj, 0.0)
        omega0 = wd0
    state0 = BodyState(R=exp_so3(theta0), omega=np.asarray(omega0, dtype=float))
    return inertia, traj, plant, gains, state0


def _scenario_noise(sc: dict) -> NoiseSpec | None:
    cfg = sc.get("noise") or {}
    d1 = float(cfg.get("measurement_amplitude", 0.0))
    d2 = float(cfg.get("disturbance_amplitude_rads2", 0.0))
    if d1 == 0.0 and d2 == 0.0:
        return None
    return NoiseSpec(delta1=d1, delta2=d2, seed=int(cfg.get("seed", 0)))


def _decay_defect_median(rec: SimRecord, mu: float, rho: float,
                         v_floor: float = 1e-6) -> float:
    """Median relative defect of the finite-difference norm derivative
    against the exact decay -rho V**(1+mu), skipping event rows."""
    t, V = rec.t, rec.homnorm
    good = np.ones(len(t), dtype=bool)
    for i in np.flatnonzero(rec.jump_flag == 1.0):
        lo, hi = max(0, int(i) - 3), min(len(t), int(i) + 3)
        good[lo:hi] = False
    fd = (V[2:] - V[:-2]) / np.maximum(t[2:] - t[:-2], 1e-300)
    model = -rho * V[1:-1] ** (1.0 + mu)
    ok = good[1:-1] & (V[1:-1] > v_floor) & (t[2:] > t[:-2])
    rel = np.abs(fd[ok] - model[ok]) / np.abs(model[ok])
    return float(np.median(rel))


def _log_slope(rec: SimRecord, skip_fraction: float = 0.05,
               v_floor: float = 1e-10) -> float:
    t, V = rec.t, rec.homnorm
    mask = (t >= t[0] + skip_fraction * (t[-1] - t[0])) & (V > v_floor)
    return float(np.polyfit(t[mask], np.log(V[mask]), 1)[0])


def _run_paper(sc: dict, outdir: Path, plots: bool):
    inertia, traj, plant, gains, state0 = _attitude_setup(sc)
    rec = simulate_tracking(inertia, gains, traj, state0, noise=_scenario_noise(sc),
                            T=sc["horizon_s"], dt=sc["dt_s"])
    est = settling_estimate(gains, float(rec.homnorm[0]))
    measured = measure_settling(rec, sc["settle_threshold"])
    rec.settling = measured

    files = [emit_csv(rec, outdir / "record.csv")]
    if plots:
        files.append(emit_plot(rec, ["theta_e_1", "theta_e_2", "theta_e_3"],
                               outdir / "theta_e.svg", title="attitude error"))
        files.append(emit_plot(rec, ["omega_err_1", "omega_err_2", "omega_err_3"],
                               outdir / "omega_err.svg", title="rate error omega_d - omega"))
        files.append(emit_plot(rec, ["homnorm"], outdir / "homnorm.svg",
                               title="homogeneous norm"))
        files.append(emit_plot(rec, ["homnorm"], outdir / "homnorm_log.svg",
                               log10=True, title="homogeneous norm (log10)"))

    ref = validate_design(reference_design(), plant)
    inc = _max_increase(rec)
    checks = {
        "lyapunov_monotone": inc < 1e-6 * float(rec.homnorm[0]),
        "zeno_guard": len(rec.events) < 100,
        "single_jump": len(rec.events) == 1,
        "settles_within_estimate": measured <= est,
    }
    extra = {
        "initial_homnorm": float(rec.homnorm[0]),
        "reference_design": {
            "design_residual_rel": ref.design_residual_rel,
            "gain_mismatch": ref.gain_mismatch,
            "min_eig_X": ref.min_eig_X,
        },
        "event_times": [ev.t for ev in rec.events],
        "reset_mismatches": [ev.reset_mismatch for ev in rec.events],
    }
    return gains, plant, rec, est, measured, inc, checks, extra, files


def _run_jump_demo(sc: dict, outdir: Path, plots: bool):
    out = _run_paper(sc, outdir, plots)
    out[6].pop("single_jump", None)
    out[6].pop("settles_within_estimate", None)
    return out


def _run_iss(sc: dict, outdir: Path, plots: bool):
    inertia, traj, plant, gains, state0 = _attitude_setup(sc)
    amplitudes = [float(a) for a in sc["amplitudes"]]
    rows = iss_sweep(inertia, gains, traj, state0, amplitudes,
                     channel=sc.get("noise_channel", "measurement"),
                     T=sc["horizon_s"], dt=sc["dt_s"],
                     seed=int(sc.get("noise_seed", 0)))
    files = []
    last_rec = None
    for amp, row in zip(amplitudes, rows):
        noise = (None if amp == 0.0 else
                 NoiseSpec(delta1=amp, delta2=0.0, seed=int(sc.get("noise_seed", 0)))
                 if sc.get("noise_channel", "measurement") == "measurement" else
                 NoiseSpec(delta1=0.0, delta2=amp, seed=int(sc.get("noise_seed", 0))))
        rec = simulate_tracking(inertia, gains, traj, state0, noise=noise,
                                T=sc["horizon_s"], dt=sc["dt_s"])
        last_rec = rec
        files.append(emit_csv(rec, outdir / f"record_amp_{amp:g}.csv"))
    summary = outdir / "iss_summary.csv"
    with open(summary, "w") as fh:
        fh.write("amplitude,steady_state_norm,jump_count\n")
        for row in rows:
            fh.write(f"{row['amplitude']:.17g},{row['steady_state_norm']:.17g},"
                     f"{row['jump_count']}\n")
    files.append(summary)
    if plots and last_rec is not None:
        files.append(emit_plot(last_rec, ["homnorm"], outdir / "homnorm_noisy.svg",
                               log10=True, title="homogeneous norm under noise (log10)"))
    residuals = [row["steady_state_norm"] for row in rows]
    checks = {
        "zero_noise_converges": residuals[0] < 1e-4 if amplitudes[0] == 0.0 else True,
        "residuals_finite": all(math.isfinite(r) for r in residuals),
        "residuals_monotone": all(residuals[i] <= residuals[i + 1]
                                  for i in range(len(residuals) - 1)),
    }
    extra = {"sweep": rows}
    return gains, plant, None, None, None, 0.0, checks, extra, files


def _run_mu_sweep(sc: dict, outdir: Path, plots: bool):
    plant = PlantMatrices.double_integrator(3)
    jump = JumpSpec.block_reflection(3, sc["jump_radius"])
    x0 = np.asarray(sc["x0"], dtype=float)
    table = []
    files = []
    checks = {}
    gains_last = None
    for mu in sc["mu_values"]:
        gains = synthesize_gains(plant, float(mu), sc["rho"],
                                 a=sc.get("design_a"), c=sc.get("design_c"))
        gains_last = gains
        T = float(sc["horizons_s"].get(f"{mu:.1f}", 1.0))
        rec = simulate_impulsive(plant, gains, jump, x0, T=T, dt=sc["dt_s"])
        entry = {
            "mu": float(mu),
            "initial_homnorm": float(rec.homnorm[0]),
            "decay_defect_median": _decay_defect_median(rec, float(mu), sc["rho"]),
            "jump_count": len(rec.events),
        }
        if mu < 0.0:
            entry["settling_estimate"] = settling_estimate(gains, float(rec.homnorm[0]))
            entry["settling_measured"] = measure_settling(rec, sc["settle_threshold"])
        elif mu == 0.0:
            entry["log_slope"] = _log_slope(rec)
        else:
            r_target = float(sc["target_radius"])
            entry["time_to_radius"] = measure_settling(rec, r_target)
            entry["time_bound"] = settling_estimate(gains, float(rec.homnorm[0]),
                                                    r=r_target)
        table.append(entry)
        name = outdir / f"mu_{mu:+.2f}.csv"
        files.append(emit_csv(rec, name))
        if plots:
            files.append(emit_plot(rec, ["homnorm"], outdir / f"mu_{mu:+.2f}_norm.svg",
                                   log10=True, title=f"norm decay, mu={mu:+.2f}"))
        checks[f"decay_defect_ok_mu_{mu:+.2f}"] = entry["decay_defect_median"] < 0.01
        checks[f"zeno_guard_mu_{mu:+.2f}"] = len(rec.events) < 100
    extra = {"sweep": table}
    return gains_last, plant, None, None, None, 0.0, checks, extra, files


def _run_impulsive(sc: dict, outdir: Path, plots: bool):
    n = int(sc["n"])
    plant = PlantMatrices.double_integrator(n)
    gains = synthesize_gains(plant, sc["mu"], sc["rho"],
                             a=sc.get("design_a"), c=sc.get("design_c"))
    jump = JumpSpec.block_reflection(n, sc["jump_radius"])
    rec = simulate_impulsive(plant, gains, jump, np.asarray(sc["x0"], dtype=float),
                             T=sc["horizon_s"], dt=sc["dt_s"])
    est = settling_estimate(gains, float(rec.homnorm[0])) if sc["mu"] < 0 else None
    measured = measure_settling(rec, sc["settle_threshold"])
    rec.settling = measured
    files = [emit_csv(rec, outdir / "record.csv")]
    if plots:
        files.append(emit_plot(rec, [f"x_{i + 1}" for i in range(2 * n)],
                               outdir / "states.svg", title="impulsive states"))
        files.append(emit_plot(rec, ["homnorm"], outdir / "homnorm_log.svg",
                               log10=True, title="homogeneous norm (log10)"))
    inc = _max_increase(rec)
    checks = {
        "lyapunov_monotone": inc < 1e-6 * max(float(rec.homnorm[0]), 1e-30),
        "zeno_guard": len(rec.events) < 100,
        "jumps_leave_surface": all(
            JumpSpec.block_reflection(n, sc["jump_radius"]).outward_form(ev.x_plus) < 0.0
            for ev in rec.events),
    }
    extra = {"event_times": [ev.t for ev in rec.events]}
    return gains, plant, rec, est, measured, inc, checks, extra, files


_RUNNERS = {
    "paper": _run_paper,
    "jump-demo": _run_jump_demo,
    "iss-noise": _run_iss,
    "mu-sweep": _run_mu_sweep,
    "impulsive-generic": _run_impulsive,
}


def run(config: ExperimentConfig) -> RunReport:
    """Execute one experiment: simulate, write CSV/SVG/report.json, summarize."""
    config.validate()
    sc = config.resolved_scenario()
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    gains, plant, rec, est, measured, inc, checks, extra, files = _RUNNERS[
        config.experiment](sc, outdir, config.emit_plots)

    report = RunReport(
        experiment=config.experiment,
        scenario=sc,
        gains=_gains_summary(gains, plant),
        settling_estimate=est,
        settling_measured=(None if measured is None or math.isinf(measured)
                           else measured),
        jump_count=len(rec.events) if rec is not None else 0,
        max_lyapunov_increase=inc,
        checks=checks,
        manifest={str(Path(f).name): _sha256(f) for f in sorted(files, key=str)},
        extra=extra,
    )
    (outdir / "report.json").write_text(report.to_json() + "\n")
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="homctrl",
        description="Run canned homogeneous-control experiments and write "
                    "CSV records, SVG plots, and a JSON report.",
    )
    parser.add_argument("experiment", choices=EXPERIMENT_IDS)
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file with scenario overrides")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default runs/<experiment>)")
    parser.add_argument("--no-plots", action="store_true")
    parser.add_argument("--dt", type=float, default=None, help="step override, s")
    parser.add_argument("--horizon", type=float, default=None,
                        help="horizon override, s")
    parser.add_argument("--seed", type=int, default=None, help="noise seed override")
    args = parser.parse_args(argv)

    scenario = {}
    if args.config is not None:
        if not args.config.exists():
            print(f"config file not found: {args.config}", file=sys.stderr)
            return 2
        scenario = json.loads(args.config.read_text())

    config = ExperimentConfig(
        experiment=args.experiment,
        outdir=args.out if args.out is not None else Path("runs") / args.experiment,
        scenario=scenario,
        emit_plots=not args.no_plots,
        dt=args.dt,
        horizon=args.horizon,
        seed=args.seed,
    )
    try:
        report = run(config)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(f"experiment: {report.experiment}")
    if report.settling_estimate is not None:
        print(f"settling estimate: {report.settling_estimate:.6g} s")
    if report.settling_measured is not None:
        print(f"settling measured: {report.settling_measured:.6g} s")
    print(f"jumps: {report.jump_count}")
    for name, ok in report.checks.items():
        print(f"check {name}: {'pass' if ok else 'FAIL'}")
    print(f"artifacts: {Path(config.outdir)}")
    return 0 if all(report.checks.values()) else 1


if __name__ == "__main__":
    raise SystemExit(main())
