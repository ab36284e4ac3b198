"""Time-dependent diffusion and damping coefficients for three reservoirs.

Prints Delta(t) and gamma(t) from the closed form next to the quadrature
oracle, then the late-time Markov limits.
"""
import numpy as np

from qbmlab import ReservoirSpec, delta_closed_at, delta_quad_at, gamma_at, markov_limits

RESERVOIRS = [(20.0, 10.0), (0.1, 10.0), (1.0, 0.01)]


def main():
    t = np.array([0.5, 1.0, 2.0, 5.0, 10.0, 40.0])
    for r, theta in RESERVOIRS:
        spec = ReservoirSpec(alpha=0.1, r=r, theta=theta)
        closed = delta_closed_at(spec, t)
        quad = delta_quad_at(spec, t)
        gam = gamma_at(spec, t)
        print(f"\nalpha = 0.1, r = {r:g}, theta = {theta:g}")
        print(f"{'t':>6} {'delta closed':>14} {'delta quad':>14} {'gamma':>12}")
        for row in zip(t, closed, quad, gam):
            print("{:6.1f} {:14.6e} {:14.6e} {:12.4e}".format(*row))
        dm, gm = markov_limits(spec)
        print(f"Markov limits: delta_M = {dm:.6e}, gamma_M = {gm:.6e}")
        if np.any(closed < 0):
            print("delta turns negative: no Lindblad form at those times")


if __name__ == "__main__":
    main()
