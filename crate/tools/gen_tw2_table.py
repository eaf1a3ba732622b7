#!/usr/bin/env python3
"""Regenerate crates/core/assets/tw2_table.csv.

F2(s) = det(I - K_Airy) on L^2(s, inf), evaluated as a Nystrom
discretisation with Gauss-Legendre nodes on [s, s + 16] (the Airy kernel is
below 1e-30 past that point). Grid: s = -10 + 0.02 * i, i = 0..800.

Usage: python3 tools/gen_tw2_table.py > crates/core/assets/tw2_table.csv
"""
import numpy as np
from scipy.special import airy

NODES = 160
LENGTH = 16.0
START, STEP, COUNT = -10.0, 0.02, 801


def airy_kernel(x, y):
    ai_x, aip_x, _, _ = airy(x)
    ai_y, aip_y, _, _ = airy(y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    num = np.outer(ai_x, aip_y) - np.outer(aip_x, ai_y)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = num / (X - Y)
    diag = aip_x**2 - x * ai_x**2
    k[np.diag_indices_from(k)] = diag
    return k


def f2(s):
    u, w = np.polynomial.legendre.leggauss(NODES)
    x = s + (u + 1.0) * LENGTH / 2.0
    w = w * LENGTH / 2.0
    sw = np.sqrt(w)
    k = airy_kernel(x, x)
    return np.linalg.det(np.eye(NODES) - sw[:, None] * k * sw[None, :])


def main():
    print("# tw2 table v1: s in [-10, 6], step 0.02, 801 rows")
    print("s,F2")
    for i in range(COUNT):
        s = START + STEP * i
        v = min(max(f2(s), 0.0), 1.0)
        print(f"{s:.2f},{v:.17e}")


if __name__ == "__main__":
    main()
