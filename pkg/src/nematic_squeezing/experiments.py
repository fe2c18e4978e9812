"""Run orchestration: single quenches, parameter sweeps, power-law fits,
dTWA-vs-exact benchmarks, and CSV/JSON persistence."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time as _time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import dtwa as dtwa_mod
from . import exact as exact_mod
from .algebra import ManifoldTriple, manifold_triple
from .lattice import (
    CouplingSpec,
    Geometry,
    ProductState,
    build_geometry,
    coupling_matrix,
    initial_state,
)
from .metrology import (
    DriveOptimum,
    SpinMoments,
    SqueezingResult,
    TimeOptimum,
    optimize_over_drive,
    optimize_over_time,
    squeezing_and_fisher,
)

METHODS = ("exact_symmetric", "exact_full", "dtwa")

DEFAULT_MANIFOLD = {
    "Bx": "Bright",
    "Dx": "Dark",
    "SAx": "A",
    "SBx": "B",
    "DxyAligned": "Bright",
    "Custom": "Bright",
}

N_BOOTSTRAP = 200


@dataclass(frozen=True)
class TimeGridSpec:
    """Save-time grids.  'linear' and 'geometric' are single spans;
    'dual' is a dense linear early window followed by a coarse tail
    (squeezing optima are early, Fisher optima can be late)."""

    kind: str = "linear"
    t_max: float = 1.0
    n_points: int = 400
    t_dense_max: float | None = None
    n_dense: int | None = None
    t_min: float = 1e-3  # first nonzero point of geometric grids

    def times(self) -> np.ndarray:
        if self.kind == "linear":
            return np.linspace(0.0, self.t_max, self.n_points)
        if self.kind == "geometric":
            return np.concatenate(
                [[0.0], np.geomspace(self.t_min, self.t_max, self.n_points - 1)]
            )
        if self.kind == "dual":
            td = self.t_dense_max if self.t_dense_max is not None else self.t_max / 10
            nd = self.n_dense if self.n_dense is not None else self.n_points // 2
            dense = np.linspace(0.0, td, nd)
            coarse = np.linspace(td, self.t_max, self.n_points - nd + 1)[1:]
            return np.concatenate([dense, coarse])
        raise ValueError(f"unknown time grid kind {self.kind!r}")


@dataclass(frozen=True)
class RunConfig:
    method: str = "exact_symmetric"
    dimension: int = 1
    extents: tuple[int, ...] = (4,)
    spacing: float = 1.0
    quantization_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    j1: float = 1.0
    jr: float = 1.0
    alpha: int = 0
    angular_factor: bool = True
    state_kind: str = "Bx"
    custom_amplitudes: tuple | None = None
    manifold: str | None = None
    drive_omega: float = 0.0
    time_grid: TimeGridSpec = field(default_factory=TimeGridSpec)
    n_traj: int = 5000
    seed: int = 7
    integrator: dtwa_mod.IntegratorConfig = field(default_factory=dtwa_mod.IntegratorConfig)
    krylov_dim: int = 30
    krylov_tol: float = 1e-10
    full_space_cap: int = exact_mod.FULL_SPACE_CAP

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "exact_symmetric" and self.alpha != 0:
            raise ValueError("exact_symmetric requires all-to-all couplings (alpha=0)")
        n = int(np.prod(self.extents))
        if self.method == "exact_full" and n > self.full_space_cap:
            raise ValueError(
                f"exact_full capped at N={self.full_space_cap} (requested {n})"
            )

    @property
    def n_atoms(self) -> int:
        return int(np.prod(self.extents))

    @property
    def antisymmetric(self) -> bool:
        return self.jr < 0

    @property
    def manifold_label(self) -> str:
        return self.manifold or DEFAULT_MANIFOLD[self.state_kind]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["time_grid"] = asdict(self.time_grid)
        d["integrator"] = asdict(self.integrator)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "time_grid" in d and isinstance(d["time_grid"], dict):
            d["time_grid"] = TimeGridSpec(**d["time_grid"])
        if "integrator" in d and isinstance(d["integrator"], dict):
            d["integrator"] = dtwa_mod.IntegratorConfig(**d["integrator"])
        for key in ("extents", "quantization_axis", "custom_amplitudes"):
            if key in d and isinstance(d[key], list):
                d[key] = tuple(d[key])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class SweepRecord:
    n_atoms: int
    jr: float
    omega_opt: float
    t_opt_xi: float
    t_opt_fq: float
    xi2_min: float
    xi2a_min: float | None
    fq_max: float
    xi2_stderr: float | None
    fq_stderr: float | None
    method: str
    seed: int
    wall_time_s: float
    flags: str = ""


RECORD_FIELDS = [f.name for f in SweepRecord.__dataclass_fields__.values()]


@dataclass
class RunResult:
    config: RunConfig
    times: np.ndarray
    results: list[SqueezingResult]
    optimum: TimeOptimum
    record: SweepRecord
    moments: list[SpinMoments]
    casimir_drift: float | None = None
    energy_drift: float | None = None


def _geometry(config: RunConfig) -> Geometry:
    return build_geometry(
        config.dimension, config.extents, config.spacing, config.quantization_axis
    )


def _couplings(config: RunConfig):
    spec = CouplingSpec(
        j1=config.j1, jr=config.jr, alpha=config.alpha, angular_factor=config.angular_factor
    )
    return coupling_matrix(_geometry(config), spec)


def _state(config: RunConfig) -> ProductState:
    return initial_state(config.state_kind, config.n_atoms, config.custom_amplitudes)


def _exact_moment_series(psis, ops, n_atoms, ref_length):
    """SpinMoments per state from three collective sparse operators."""
    out = []
    for psi in psis:
        opsi = [op @ psi for op in ops]
        mean = np.array([np.vdot(psi, w).real for w in opsi])
        second = np.zeros((3, 3))
        for i in range(3):
            for j in range(i, 3):
                second[i, j] = second[j, i] = np.vdot(opsi[i], opsi[j]).real
        cov = second - np.outer(mean, mean)
        out.append(
            SpinMoments(mean=mean, cov=cov, n_atoms=n_atoms, ref_length=ref_length)
        )
    return out


def run_single(config: RunConfig) -> RunResult:
    t_start = _time.perf_counter()
    times = config.time_grid.times()
    triple = manifold_triple(config.manifold_label)
    obs = triple.observables
    n = config.n_atoms
    # the metrology-normalized observables give every x-aligned product
    # state perpendicular variance N/4, so the fixed reference length is
    # N/2 for all manifolds
    ref_len = n * triple.spin * triple.coherent_scale**2
    casimir_drift = energy_drift = None
    xi_stderr_series = fq_stderr_series = None

    if config.method == "exact_symmetric":
        basis = exact_mod.symmetric_basis(n)
        h = exact_mod.collective_hamiltonian(n, config.jr, config.drive_omega, config.j1)
        psi0 = exact_mod.symmetric_state(_state(config), basis)
        ops = [exact_mod.collective_operator(o, basis) for o in obs]
        moments = []

        def cb(idx, t, psi):
            moments.extend(_exact_moment_series([psi], ops, n, ref_len))

        exact_mod.evolve(h, psi0, times, config.krylov_dim, config.krylov_tol, callback=cb)
    elif config.method == "exact_full":
        couplings = _couplings(config)
        h = exact_mod.full_hamiltonian(couplings, config.drive_omega, config.full_space_cap)
        psi0 = exact_mod.full_state(_state(config))
        ops = [exact_mod.collective_operator(o, n) for o in obs]
        moments = []

        def cb(idx, t, psi):
            moments.extend(_exact_moment_series([psi], ops, n, ref_len))

        exact_mod.evolve(h, psi0, times, config.krylov_dim, config.krylov_tol, callback=cb)
    else:
        couplings = _couplings(config)
        rhs = dtwa_mod.MeanFieldRhs(couplings, config.drive_omega)
        ensemble = dtwa_mod.sample_phase_points(_state(config), config.n_traj, config.seed)
        stats = dtwa_mod.run_trajectories(
            ensemble, rhs, times, list(obs), config.integrator
        )
        casimir_drift = stats.casimir_drift
        energy_drift = stats.energy_drift
        mean, cov = dtwa_mod.ensemble_moments(stats)
        moments = [
            SpinMoments(mean=mean[i], cov=cov[i], n_atoms=n, ref_length=ref_len)
            for i in range(len(times))
        ]
        xi_stderr_series, fq_stderr_series = _bootstrap_stderr(
            stats, n, ref_len, config.seed, config.antisymmetric
        )

    anti = config.antisymmetric
    results = [squeezing_and_fisher(m, antisymmetric=anti) for m in moments]
    if xi_stderr_series is not None:
        results = [
            replace(r, xi2_stderr=float(xs), fq_stderr=float(fs))
            for r, xs, fs in zip(results, xi_stderr_series, fq_stderr_series)
        ]
    opt = optimize_over_time(times, results)
    wall = _time.perf_counter() - t_start

    flags = []
    if opt.xi_boundary:
        flags.append("xi_boundary")
    if opt.fq_boundary:
        flags.append("fq_boundary")
    if casimir_drift is not None and casimir_drift > config.integrator.casimir_tolerance:
        flags.append("casimir_degraded")
    xi_idx = int(np.argmin([r.xi2 if np.isfinite(r.xi2) else np.inf for r in results]))
    fq_idx = int(np.argmax([r.fq for r in results]))
    record = SweepRecord(
        n_atoms=n,
        jr=config.jr,
        omega_opt=config.drive_omega,
        t_opt_xi=opt.t_opt_xi,
        t_opt_fq=opt.t_opt_fq,
        xi2_min=opt.xi2_min,
        xi2a_min=2.0 * opt.xi2_min if anti else None,
        fq_max=opt.fq_max,
        xi2_stderr=results[xi_idx].xi2_stderr,
        fq_stderr=results[fq_idx].fq_stderr,
        method=config.method,
        seed=config.seed,
        wall_time_s=wall,
        flags="|".join(flags),
    )
    return RunResult(
        config=config,
        times=times,
        results=results,
        optimum=opt,
        record=record,
        moments=moments,
        casimir_drift=casimir_drift,
        energy_drift=energy_drift,
    )


def _bootstrap_stderr(stats, n_atoms, ref_length, seed, antisymmetric, n_boot=N_BOOTSTRAP):
    """Bootstrap standard errors of xi^2 and F_Q at every time point."""
    rng = np.random.Generator(np.random.Philox(key=seed ^ 0xB007))
    n_times = len(stats.times)
    xi = np.zeros((n_boot, n_times))
    fq = np.zeros((n_boot, n_times))
    for b in range(n_boot):
        idx = rng.integers(0, stats.n_traj, size=stats.n_traj)
        mean, cov = dtwa_mod.ensemble_moments(stats, idx)
        for it in range(n_times):
            r = squeezing_and_fisher(
                SpinMoments(mean=mean[it], cov=cov[it], n_atoms=n_atoms, ref_length=ref_length),
                antisymmetric=antisymmetric,
            )
            xi[b, it] = r.xi2
            fq[b, it] = r.fq
    return xi.std(axis=0, ddof=1), fq.std(axis=0, ddof=1)


def default_omega_scan(n_atoms: int, j1: float = 1.0, n_points: int = 8) -> list[float]:
    """Log-spaced drive scan over [0.1, 10] * J1 * sqrt(N)."""
    return list(np.geomspace(0.1, 10.0, n_points) * abs(j1) * np.sqrt(n_atoms))


def run_with_drive_scan(
    config: RunConfig, omegas: list[float] | None = None
) -> tuple[RunResult, DriveOptimum]:
    """Run once per drive strength and keep the best-squeezing run."""
    if omegas is None:
        omegas = default_omega_scan(config.n_atoms, config.j1)
    per_omega = {}
    runs = {}
    for om in omegas:
        res = run_single(replace(config, drive_omega=float(om)))
        per_omega[float(om)] = (res.optimum.xi2_min, res.optimum.fq_max)
        runs[float(om)] = res
    best = optimize_over_drive(per_omega)
    winner = runs[best.omega_opt]
    if best.boundary and "omega_boundary" not in winner.record.flags:
        winner.record.flags = (
            winner.record.flags + "|omega_boundary" if winner.record.flags else "omega_boundary"
        )
    # F_Q is reported at the same drive that optimizes squeezing
    return winner, best


@dataclass(frozen=True)
class FitResult:
    exponent: float
    amplitude: float
    exponent_stderr: float
    window: tuple[float, float]
    residual: float
    n_points: int

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "amplitude": self.amplitude,
            "exponent_stderr": self.exponent_stderr,
            "window": list(self.window),
            "residual": self.residual,
            "n_points": self.n_points,
        }


def power_law_fit(points, window: tuple[float, float] | None = None) -> FitResult:
    """OLS fit of y = amplitude * N^exponent on (ln N, ln y)."""
    pts = [(float(n), float(y)) for n, y in points]
    if window is not None:
        pts = [(n, y) for n, y in pts if window[0] <= n <= window[1]]
    if len(pts) < 3:
        raise ValueError("power-law fit needs at least 3 points in the window")
    ns = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(ns <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit requires positive N and y")
    x = np.log(ns)
    z = np.log(ys)
    A = np.stack([x, np.ones_like(x)], axis=1)
    coef, res, _, _ = np.linalg.lstsq(A, z, rcond=None)
    resid = z - A @ coef
    dof = max(1, len(pts) - 2)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    lo, hi = float(ns.min()), float(ns.max())
    return FitResult(
        exponent=float(coef[0]),
        amplitude=float(np.exp(coef[1])),
        exponent_stderr=float(np.sqrt(cov[0, 0])),
        window=(lo, hi) if window is None else (float(window[0]), float(window[1])),
        residual=float(np.sqrt(resid @ resid / len(pts))),
        n_points=len(pts),
    )


@dataclass
class ScalingResult:
    records: list[SweepRecord]
    xi_fit: FitResult
    fq_fit: FitResult
    runs: list[RunResult]


def run_scaling(
    configs: list[RunConfig],
    fit_window: tuple[float, float] | None = None,
    omega_scan: bool = False,
    omegas_by_n: dict[int, list[float]] | None = None,
    use_xi2a: bool | None = None,
    max_extensions: int = 3,
) -> ScalingResult:
    """Per-size optimization followed by log-log fits of xi^2 and F_Q.

    Boundary-flagged time optima trigger automatic window extension (the
    grid is rerun with doubled t_max, up to ``max_extensions`` times).
    """
    if len(configs) < 3:
        raise ValueError("scaling sweep needs at least 3 sizes")
    records = []
    runs = []
    for cfg in configs:
        res = _run_with_extension(cfg, omega_scan, omegas_by_n, max_extensions)
        records.append(res.record)
        runs.append(res)
    records.sort(key=lambda r: r.n_atoms)
    anti = use_xi2a if use_xi2a is not None else configs[0].jr < 0
    xi_pts = [
        (r.n_atoms, r.xi2a_min if (anti and r.xi2a_min is not None) else r.xi2_min)
        for r in records
    ]
    fq_pts = [(r.n_atoms, r.fq_max) for r in records]
    xi_fit = power_law_fit(xi_pts, fit_window)
    fq_fit = power_law_fit(fq_pts, fit_window)
    return ScalingResult(records=records, xi_fit=xi_fit, fq_fit=fq_fit, runs=runs)


def _run_with_extension(cfg, omega_scan, omegas_by_n, max_extensions):
    for _ in range(max_extensions + 1):
        if omega_scan:
            omegas = (omegas_by_n or {}).get(cfg.n_atoms)
            res, _ = run_with_drive_scan(cfg, omegas)
        else:
            res = run_single(cfg)
        if not (res.optimum.xi_boundary or res.optimum.fq_boundary):
            return res
        tg = cfg.time_grid
        cfg = replace(
            cfg,
            time_grid=replace(
                tg,
                t_max=2.0 * tg.t_max,
                t_dense_max=None if tg.t_dense_max is None else 2.0 * tg.t_dense_max,
            ),
        )
    return res


@dataclass
class BenchmarkReport:
    max_rel_dev_xi2: float
    max_rel_dev_fq: float
    dev_at_xi_opt: float
    dev_at_fq_opt: float
    fq_peak_time_rel_dev: float
    fq_peak_height_rel_dev: float
    window_end_time: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def benchmark_compare(config_test: RunConfig, config_ref: RunConfig) -> tuple[BenchmarkReport, RunResult, RunResult]:
    """Compare two methods on the same physics and time grid.

    Deviations are reported over the window up to the reference's first
    xi^2 minimum (squeezing) / first F_Q maximum (Fisher information).
    """
    if config_test.time_grid != config_ref.time_grid:
        raise ValueError("benchmark configs must share the time grid")
    for key in ("jr", "j1", "alpha", "drive_omega", "state_kind", "extents", "dimension"):
        if getattr(config_test, key) != getattr(config_ref, key):
            raise ValueError(f"benchmark configs disagree on {key}")
    res_t = run_single(config_test)
    res_r = run_single(config_ref)
    xi_t = np.array([r.xi2 for r in res_t.results])
    xi_r = np.array([r.xi2 for r in res_r.results])
    fq_t = np.array([r.fq for r in res_t.results])
    fq_r = np.array([r.fq for r in res_r.results])
    i_xi = int(np.argmin(xi_r))
    i_fq = int(np.argmax(fq_r))
    end = max(i_xi, 1)
    end_fq = max(i_fq, 1)
    dev_xi = np.abs(xi_t[: end + 1] - xi_r[: end + 1]) / np.abs(xi_r[: end + 1])
    dev_fq = np.abs(fq_t[: end_fq + 1] - fq_r[: end_fq + 1]) / np.maximum(
        np.abs(fq_r[: end_fq + 1]), 1e-12
    )
    i_fq_t = int(np.argmax(fq_t))
    t_span = max(res_r.times[i_fq], res_r.times[1])
    report = BenchmarkReport(
        max_rel_dev_xi2=float(dev_xi.max()),
        max_rel_dev_fq=float(dev_fq.max()),
        dev_at_xi_opt=float(abs(res_t.optimum.xi2_min - res_r.optimum.xi2_min) / res_r.optimum.xi2_min),
        dev_at_fq_opt=float(abs(res_t.optimum.fq_max - res_r.optimum.fq_max) / res_r.optimum.fq_max),
        fq_peak_time_rel_dev=float(abs(res_t.times[i_fq_t] - res_r.times[i_fq]) / t_span),
        fq_peak_height_rel_dev=float(abs(fq_t[i_fq_t] - fq_r[i_fq]) / fq_r[i_fq]),
        window_end_time=float(res_r.times[i_xi]),
    )
    return report, res_t, res_r


# ---------------------------------------------------------------------------
# persistence


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file + rename so failures never leave partials."""
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in records:
        w.writerow([_fmt(getattr(r, f)) for f in RECORD_FIELDS])
    return buf.getvalue()


def write_records_csv(path: str, records: list[SweepRecord]) -> None:
    atomic_write_text(path, records_to_csv(records))


def read_records_csv(path: str) -> list[SweepRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out.append(
                SweepRecord(
                    n_atoms=int(row["n_atoms"]),
                    jr=float(row["jr"]),
                    omega_opt=float(row["omega_opt"]),
                    t_opt_xi=float(row["t_opt_xi"]),
                    t_opt_fq=float(row["t_opt_fq"]),
                    xi2_min=float(row["xi2_min"]),
                    xi2a_min=float(row["xi2a_min"]) if row["xi2a_min"] else None,
                    fq_max=float(row["fq_max"]),
                    xi2_stderr=float(row["xi2_stderr"]) if row["xi2_stderr"] else None,
                    fq_stderr=float(row["fq_stderr"]) if row["fq_stderr"] else None,
                    method=row["method"],
                    seed=int(row["seed"]),
                    wall_time_s=float(row["wall_time_s"]),
                    flags=row.get("flags", ""),
                )
            )
    return out


def timeseries_to_csv(result: RunResult) -> str:
    anti = result.config.antisymmetric
    has_err = result.results[0].xi2_stderr is not None
    cols = ["t", "xi2"]
    if anti:
        cols.append("xi2_A")
    cols += ["fq", "spin_length"]
    if has_err:
        cols += ["xi2_stderr", "fq_stderr"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for t, r in zip(result.times, result.results):
        row = [_fmt(float(t)), _fmt(r.xi2)]
        if anti:
            row.append(_fmt(r.xi2_a))
        row += [_fmt(r.fq), _fmt(r.spin_length)]
        if has_err:
            row += [_fmt(r.xi2_stderr), _fmt(r.fq_stderr)]
        w.writerow(row)
    return buf.getvalue()


def run_metadata(config: RunConfig, extra: dict | None = None) -> dict:
    from . import __version__

    meta = {
        "code_version": __version__,
        "config": config.to_dict(),
        "seed": config.seed,
    }
    if extra:
        meta.update(extra)
    return meta


def write_json(path: str, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
