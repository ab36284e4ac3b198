"""Heating of the ground state and the observables of a squeezed state.

Compares the exact heating curve with its Markovian approximation, then
prints the position variance and Mandel Q of a squeezed vacuum.
"""
import numpy as np

from qbmlab import ReservoirSpec, build_grid, heating_at, heating_markov, thermal_n
from qbmlab.analytic import InitialStateMoments, observables_table
from qbmlab.coefficients import time_grid


def main():
    spec = ReservoirSpec(alpha=0.1, r=0.1, theta=10.0)
    grid = build_grid(spec, time_grid(100.0, 4001))
    t = np.linspace(0.0, 100.0, 11)
    exact = heating_at(grid, 0.0, t)
    markov = heating_markov(spec, 0.0, t)
    print(f"ground state heating, r = 0.1, theta = 10 (thermal <n> = {thermal_n(spec):.3f})")
    print(f"{'t':>6} {'exact':>12} {'markov':>12}")
    for row in zip(t, exact, markov):
        print("{:6.1f} {:12.5f} {:12.5f}".format(*row))

    cold = ReservoirSpec.from_rc(0.01, 0.05, 0.2e-6)
    grid = build_grid(cold, time_grid(40.0, 1601))
    s = 0.4
    n0 = (s + 1 / s) / 4 - 0.5
    moments = InitialStateMoments(n0, 2 * n0 + 1, s / 2, 1 / (2 * s))
    table = observables_table(grid, moments, np.linspace(0.0, 40.0, 9))
    print("\nsqueezed vacuum (s = 0.4) in a cold low-cutoff reservoir")
    print(f"{'t':>6} {'<n>':>10} {'var x':>10} {'Q':>10}")
    for row in zip(table["t"], table["n_mean"], table["var_x"], table["mandel_q"]):
        print("{:6.1f} {:10.5f} {:10.5f} {:10.5f}".format(*row))


if __name__ == "__main__":
    main()
