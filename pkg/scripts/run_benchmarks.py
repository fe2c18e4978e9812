#!/usr/bin/env python3
"""dTWA-vs-exact benchmarks: all-to-all symmetric (N=49, three Jr values),
all-to-all antisymmetric with drive (N=100), and a 3x3 dipolar array.

Writes one deviation-report JSON plus paired time-series CSVs per case.

Usage: run_benchmarks.py [outdir] [--ntraj 5000]
"""

import argparse
import os

from nematic_squeezing.experiments import (
    RunConfig,
    TimeGridSpec,
    atomic_write_text,
    benchmark_compare,
    timeseries_to_csv,
    write_json,
)


def benchmark_cases(n_traj: int):
    cases = {}
    for jr in (1.0, 0.5, -0.5):
        grid = TimeGridSpec(kind="linear", t_max=0.45, n_points=150)
        ref = RunConfig(
            method="exact_symmetric", extents=(49,), alpha=0, jr=jr,
            state_kind="Bx", time_grid=grid,
        )
        test = RunConfig(
            method="dtwa", extents=(49,), alpha=0, jr=jr, state_kind="Bx",
            n_traj=n_traj, time_grid=grid,
        )
        cases[f"a2a_symmetric_jr{jr:+.1f}"] = (test, ref)

    grid = TimeGridSpec(kind="linear", t_max=0.35, n_points=150)
    ref = RunConfig(
        method="exact_symmetric", extents=(100,), alpha=0, jr=-1.0,
        state_kind="SAx", drive_omega=40.0, time_grid=grid,
    )
    test = RunConfig(
        method="dtwa", extents=(100,), alpha=0, jr=-1.0, state_kind="SAx",
        drive_omega=40.0, n_traj=n_traj, time_grid=grid,
    )
    cases["a2a_antisymmetric_n100"] = (test, ref)

    grid = TimeGridSpec(kind="linear", t_max=4.0, n_points=200)
    ref = RunConfig(
        method="exact_full", dimension=2, extents=(3, 3), alpha=3, jr=1.0,
        state_kind="Bx", time_grid=grid,
    )
    test = RunConfig(
        method="dtwa", dimension=2, extents=(3, 3), alpha=3, jr=1.0,
        state_kind="Bx", n_traj=n_traj, time_grid=grid,
    )
    cases["dipolar_2d_n9"] = (test, ref)
    return cases


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default="out/benchmarks")
    ap.add_argument("--ntraj", type=int, default=5000)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    summary = {}
    for name, (test, ref) in benchmark_cases(args.ntraj).items():
        report, res_t, res_r = benchmark_compare(test, ref)
        summary[name] = report.to_dict()
        atomic_write_text(
            os.path.join(args.outdir, f"{name}_dtwa.csv"), timeseries_to_csv(res_t)
        )
        atomic_write_text(
            os.path.join(args.outdir, f"{name}_exact.csv"), timeseries_to_csv(res_r)
        )
        print(
            f"{name}: max dev xi2 {report.max_rel_dev_xi2:.3f}, "
            f"fq {report.max_rel_dev_fq:.3f}, "
            f"fq peak time dev {report.fq_peak_time_rel_dev:.3f}, "
            f"height dev {report.fq_peak_height_rel_dev:.3f}"
        )
    write_json(os.path.join(args.outdir, "benchmarks.json"), summary)


if __name__ == "__main__":
    main()
