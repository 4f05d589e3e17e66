"""Regimes, predicted zero counts and computed zeros for a few parameter triples."""

from genjacobi import classify, hilbert_klein, quasi_lower_bound, zero_report

TRIPLES = [(4, 0.5, 0.5), (5, 2.5, -3.7), (5, -2.3, 0.5), (12, -7.4, -3.1), (5, -4.5, -4.3)]


def main():
    rep = classify(75, -37.4, -25.1)
    print(f"n=75 alpha=-37.4 beta=-25.1: {rep.tag} counts {rep.counts()} "
          f"zeros in (-1,1): {hilbert_klein(75, -37.4, -25.1)}")
    for n, a, b in TRIPLES:
        rep = classify(n, a, b)
        z = zero_report(n, a, b)
        print(f"n={n:2d} alpha={a:5.1f} beta={b:5.1f}  {rep.tag:15s} blocks {rep.counts()}  "
              f"N={hilbert_klein(n, a, b)} found={z.count_in_minus1_1} "
              f"lower bound={quasi_lower_bound(n, a, b)}")


if __name__ == "__main__":
    main()
