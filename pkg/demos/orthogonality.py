"""Vanishing moments on the double loop and on the regime contours."""

from genjacobi import characterize, verify_main, verify_regime


def main():
    for n, a, b in [(3, 0.4 + 0.2j, -0.7), (6, -5.4, 2.6), (8, -2.3, -0.7)]:
        rep = verify_main(n, a, b)
        print(f"double loop n={n} alpha={a} beta={b}: {rep.verdict}, "
              f"max vanishing {rep.max_vanishing_residual:.1e}, I_n rel err {rep.top_residual:.1e}")
    for n, a, b in [(5, 2.5, -3.7), (10, -5.4, -2.3), (5, -4.5, -4.3)]:
        res = verify_regime(n, a, b)
        ch = characterize(n, a, b)
        print(f"{res.tag:10s} n={n} alpha={a} beta={b}: {res.verdict}, "
              f"recovered monic P_n deviation {ch.deviation:.1e} "
              f"(condition {ch.condition_estimate:.1e})")


if __name__ == "__main__":
    main()
