"""Interference fringe versus field-inversion time.

Each arm carries one crystal; the right crystal's field is flipped at t_phi,
giving a relative phase 2 delta_b t_phi between the arms.  The normalised
detector-B intensity follows sin^2(delta_b t_phi).
"""
import time

import numpy as np

from nucent import SampleParams, TimeGrid, fringe_scan

s = SampleParams()
t_phi = np.arange(0.0, 60.5, 2.5)

start = time.perf_counter()
points = fringe_scan(s, t_phi, TimeGrid())
print(f"{len(points)} scan points in {time.perf_counter() - start:.2f} s\n")

print(" t_phi     q_b       q_c    q_b_norm  sin^2")
for p in points:
    print(f"{p.t_phi:6.1f}  {p.q_b:8.4f}  {p.q_c:8.4f}  {p.q_b_norm:7.4f}  {np.sin(s.delta_b * p.t_phi) ** 2:7.4f}")
