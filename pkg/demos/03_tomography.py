"""Reconstructing the two-path state from counts and fringe visibility.

Only the diagonal and the |01>-|10> coherence are reconstructed.  The
coherence is estimated from the visibility as V (p01 + p10) / 2, and the
concurrence bound follows from the sparse matrix.
"""
import numpy as np

from nucent import DiagonalProbs, TPEDensityMatrix, Visibility, assemble_rho, coherence_estimate, concurrence

probs = DiagonalProbs(p01=0.4, p10=0.4, p11=0.05, p00=0.15)
v = Visibility(0.9)
rho = TPEDensityMatrix(probs, coherence_estimate(probs, v), 1.0)
print(f"concurrence with double counts: {concurrence(rho):.4f}")

np.set_printoptions(precision=3, suppress=True)
print(rho.normalized.real)

# Ideal single-photon state: no vacuum or double counts, full visibility
ideal = assemble_rho(DiagonalProbs(0.5, 0.5, 0.0, 0.0), Visibility(1.0))
print(f"ideal state concurrence: {concurrence(ideal):.4f}")

# Concurrence falls as the visibility drops
for vis in (1.0, 0.8, 0.6, 0.4):
    r = assemble_rho(probs, Visibility(vis))
    print(f"V = {vis:.1f}  ->  C = {concurrence(r):.4f}")
