"""Jump, determinant and normalization checks of the 2x2 Riemann-Hilbert solution."""

from genjacobi import rh_verify


def main():
    for n, a, b in [(2, 0.3, 0.6), (3, 0.4, -0.7), (4, -0.6, 1.4)]:
        rep = rh_verify(n, a, b, probe=True)
        worst = max(m for _, _, m in rep.boundedness)
        print(f"n={n} alpha={a} beta={b}: max jump {rep.max_jump:.1e}, max |det Y - 1| "
              f"{rep.max_det:.1e}, decay ratio {rep.decay_ratio:.3f}, "
              f"max |Y| near crossings {worst:.2f} -> {'PASS' if rep.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
