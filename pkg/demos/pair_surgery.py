"""Two surgeries with opposite q: the H-periods cancel and the result is untwisted.

Usage: python3 demos/pair_surgery.py [grid]
"""
import sys

from b3gc import surgery as sg


def main(grid=32):
    pair = [sg.SurgeryData(p=0, q=1), sg.SurgeryData(p=1, q=-1, center=(5.0, 0.0))]
    for surgeries in (pair[:1], pair):
        res = sg.multi_surgery(None, surgeries, resolution=grid, chart_checks=False)
        ps = ", ".join(f"({d.p},{d.q})" for d in surgeries)
        print(f"surgeries {ps}: H-period sum {res.h_period_sum:+.3e}, "
              f"type-change curves {res.locus_count}, verdict: {res.verdict}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 32)
