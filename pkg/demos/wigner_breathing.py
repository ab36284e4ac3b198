"""Wigner function of a coherent state in a cold, slow reservoir.

The centre rotates with only slow damping. The width grows on average
but not monotonically: it dips between rises, which is a sign that the
reservoir has memory.
"""
import numpy as np

from qbmlab import ReservoirSpec, build_grid, wigner_coherent


def main():
    spec = ReservoirSpec.from_rc(0.01, 0.05, 1e-7)
    grid = build_grid(spec, np.linspace(0.0, 60.0, 2401))
    print(f"{'t':>6} {'centre':>22} {'width':>10} {'W(centre)':>10}")
    for t in np.linspace(0.0, 60.0, 13):
        w = wigner_coherent(grid, 1.0, t)
        c = w.center
        print(f"{t:6.1f} {c.real:10.5f}{c.imag:+10.5f}j {w.width:10.6f} "
              f"{float(w(c)):10.5f}")


if __name__ == "__main__":
    main()
