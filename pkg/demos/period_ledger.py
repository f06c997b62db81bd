"""Print the boundary-torus periods and glue residual for a small (p, q, c) lattice.

Usage: python3 demos/period_ledger.py [grid]
"""
import sys

from b3gc import surgery as sg


def main(grid=32):
    print(f"{'p':>3} {'q':>3} {'c':>5} {'H-period':>20} {'F-proxy':>10} {'glue':>10}")
    for p in (-1, 0, 2):
        for q in (1, -1):
            for c in (0.5, 2.0):
                data = sg.SurgeryData(p=p, q=q, c=c)
                glued = sg.split_twist(data, grid, run_checks=False)
                per = sg.boundary_periods(glued, resolution=grid)
                glue = sg.verify_glue(data, resolution=16).worst_residual
                print(f"{p:>3} {q:>3} {c:>5g} {per.h_period:>20.15f} {per.f_period_proxy:>10.2e} {glue:>10.2e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 32)
