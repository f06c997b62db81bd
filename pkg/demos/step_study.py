"""Normalized-closed residual on two catalog entries as the difference step grows.

Plain central differences are used, so the residual should grow like step**2.
"""
import numpy as np

from b3gc import catalog as cg
from b3gc import structure as st


def main():
    for name in ("typechange-CxR", "glued-S2xS1"):
        chart = cg.make(name, resolution=16).charts[0]
        pts = chart.domain.grid().valid_points()
        r = np.hypot(pts[:, 0], pts[:, 1])
        pts = pts[(r > 0.5) & (r < 0.7)]
        for h in (1e-4, 1e-3, 1e-2):
            rep = st.normalize_check_closed(chart.field, pts, step=h, richardson=False)
            print(f"{name:16s} step {h:7.0e}  residual {rep.worst_residual:.3e}")


if __name__ == "__main__":
    main()
