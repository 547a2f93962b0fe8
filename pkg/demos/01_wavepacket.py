"""Forward-scattered wavepacket of a single 57Fe crystal.

The response is a Bessel multiple-scattering envelope times a quantum beat
cos(delta_b t).  Inverting the hyperfine field at t_phi reverses the sign of
the accumulated beat phase from then on.
"""
import numpy as np

from nucent import FieldSchedule, SampleParams, TimeGrid, envelope, scattered_wavepacket, scheduled_wavepacket

s = SampleParams()  # alpha = 1, gamma = 1/141 ns^-1, delta_b = 30 gamma
grid = TimeGrid(0.0, 200.0, 0.01)
t = grid.times

psi = scattered_wavepacket(s, grid).amplitude
print(f"beat period 2 pi / delta_b = {s.beat_period:.3f} ns")

# Zero crossings of the beat sit at (2n + 1) pi / (2 delta_b)
idx = np.flatnonzero(np.sign(psi[:-1]) != np.sign(psi[1:]))[:5]
for n, i in enumerate(idx):
    print(f"node {n}: {t[i]:8.3f} ns   expected {(2 * n + 1) * np.pi / (2 * s.delta_b):8.3f} ns")

# The envelope decays as exp(-gamma t / 2) modulated by J1
for time in (0.0, 50.0, 141.0):
    print(f"A({time:5.1f} ns) = {float(envelope(s, time)):.5f}")

# Inverting the field at 20 ns mirrors the beat phase about that time
sched = FieldSchedule.inverted_at(20.0)
psi_s = scheduled_wavepacket(s, sched, grid).amplitude
k = np.searchsorted(t, 30.0)
print(f"psi(30 ns) = {psi[k]:+.5f}, with inversion at 20 ns: {psi_s[k]:+.5f}")
