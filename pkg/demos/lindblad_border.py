"""Where the master equation stops being of Lindblad type.

Classifies a few reservoirs, lists their negative-coefficient windows and
locates the critical cutoff of the high-temperature border.
"""
from qbmlab import ReservoirSpec, border


def main():
    for r, theta in [(20.0, 10.0), (0.1, 10.0), (1.0, 0.01), (0.3, 1.0)]:
        spec = ReservoirSpec(0.1, r, theta)
        print(f"r = {r:g}, theta = {theta:g}: {border.classify(spec)}")
        for name, prof in border.sign_profile(spec).items():
            for a, b in prof.negative_intervals[:3]:
                print(f"    {name} < 0 for t in ({a:.3f}, {b:.3f})")
    print(f"high-temperature critical cutoff r* = {border.critical_r_high_t():.5f}")


if __name__ == "__main__":
    main()
