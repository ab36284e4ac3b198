"""Quantum-trajectory estimate of the heating curve.

Runs a modest ensemble of non-Markovian wave-function trajectories and
prints the estimate, its standard error and the analytic curve.
"""
import numpy as np

from qbmlab import ReservoirSpec, build_grid, heating_at, nmwf


def main():
    grid = build_grid(ReservoirSpec(0.1, 0.1, 10.0), np.linspace(0.0, 100.0, 8001))
    samples = np.linspace(0.0, 100.0, 11)
    cfg = nmwf.TrajectoryConfig(initial=nmwf.Fock(0), n_max=30, beta=1.0,
                                t_grid=samples, seed=7, n_traj=2000)
    est = nmwf.run_ensemble(cfg, grid, workers=2)
    ref = heating_at(grid, 0.0, samples)
    print(f"{est.n_traj} trajectories in {est.wall_time:.1f} s, "
          f"{est.multi_jump_fraction:.1%} with more than one jump")
    print(f"{'t':>6} {'<n> MC':>10} {'stderr':>10} {'analytic':>10}")
    for row in zip(samples, est.n_mean, est.n_stderr, ref):
        print("{:6.1f} {:10.5f} {:10.5f} {:10.5f}".format(*row))


if __name__ == "__main__":
    main()
