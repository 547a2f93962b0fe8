"""XPDC source: second-order susceptibility, pump density, flux and heralding rate.

All internal arithmetic is SI.  Photon energies are given in eV and turned
into angular frequencies with hbar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as sc

from .errors import DomainError, SingularDenominatorError

__all__ = [
    "DIAMOND_LATTICE_CONSTANT",
    "FE57_LINEWIDTH_EV",
    "QUOTED_PUMP_DENSITY",
    "QUOTED_RATE",
    "XPDCParams",
    "PumpParams",
    "SourceReference",
    "RateReport",
    "energy_to_omega",
    "chi2_111",
    "si_to_gaussian_chi2",
    "pump_density",
    "signal_flux",
    "heralded_rate",
    "rate_report",
]

DIAMOND_LATTICE_CONSTANT = 3.567e-10  # m
FE57_LINEWIDTH_EV = 29.3e-9
# Commonly quoted pump density and rate; kept to flag the mismatch with the
# arithmetic, not used in any calculation.
QUOTED_PUMP_DENSITY = 5.5e18  # photons/s/mm^2
QUOTED_RATE = 1.0  # Hz, "around"

_SI_TO_GAUSSIAN = sc.c * 1e2 / 10.0 / 1e5  # 1 C = c[cm/s]/10 statC, 1 N = 1e5 dyn


def energy_to_omega(energy_ev):
    """Angular frequency (rad/s) of a photon of ``energy_ev`` eV."""
    return energy_ev * sc.e / sc.hbar


@dataclass(frozen=True)
class XPDCParams:
    """Down-conversion crystal and photon energies.

    ``f_v111`` (valence structure factor) has no reliable published value
    here; the default of 3.0 is a placeholder of the right magnitude for
    diamond and should be replaced for quantitative work.
    """

    signal_ev: float = 14.4e3
    idler_ev: float = 100.0
    n_cell: float = 1.0 / DIAMOND_LATTICE_CONSTANT**3
    f_v111: float = 3.0
    q111: float = 2.0 * math.pi * math.sqrt(3.0) / DIAMOND_LATTICE_CONSTANT
    m: float = sc.m_e
    e: float = sc.e
    c: float = sc.c
    eps0: float = sc.epsilon_0

    def __post_init__(self):
        for name in ("signal_ev", "idler_ev", "n_cell", "f_v111", "q111", "m", "e", "c", "eps0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"XPDCParams.{name} must be positive and finite")

    @property
    def omega_s(self):
        return energy_to_omega(self.signal_ev)

    @property
    def omega_i(self):
        return energy_to_omega(self.idler_ev)


@dataclass(frozen=True)
class PumpParams:
    photons_per_pulse: float = 1e12
    rep_rate: float = 2.7e4  # 1/s
    spot_area: float = 0.0005  # mm^2

    def __post_init__(self):
        for name in ("photons_per_pulse", "rep_rate", "spot_area"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"PumpParams.{name} must be positive and finite")


@dataclass(frozen=True)
class SourceReference:
    """Anchor for the flux scaling xi ~ |chi|^2 I_p."""

    chi_ref: float = 1e-20  # C/N
    ip_ref: float = QUOTED_PUMP_DENSITY  # photons/s/mm^2
    xi_ref: float = 2.9e6  # photons/s
    bandwidth: float = 1.0  # eV

    def __post_init__(self):
        for name in ("chi_ref", "ip_ref", "xi_ref", "bandwidth"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"SourceReference.{name} must be positive and finite")


def chi2_111(p):
    """|chi^(2)_111| in C/N for the 111 reflection of the XPDC crystal.

    N e^3 F (c^2 Q^2 - 4 ws wi) / (4 c eps0 m^2 ws wi^2 (ws^2 - wi^2))
    """
    ws, wi = p.omega_s, p.omega_i
    if ws == wi:
        raise SingularDenominatorError("signal and idler frequencies coincide")
    num = p.n_cell * p.e**3 * p.f_v111 * (p.c**2 * p.q111**2 - 4.0 * ws * wi)
    den = 4.0 * p.c * p.eps0 * p.m**2 * ws * wi**2 * (ws**2 - wi**2)
    return abs(num / den)


def si_to_gaussian_chi2(chi_si):
    """Convert a C/N susceptibility to statcoulomb/dyne."""
    return chi_si * _SI_TO_GAUSSIAN


def pump_density(p):
    """Photons per second per mm^2 delivered by the pulse train."""
    return p.photons_per_pulse * p.rep_rate / p.spot_area


def signal_flux(ref, chi, ip):
    """Signal flux scaled from the reference point, quadratic in chi."""
    return ref.xi_ref * (chi / ref.chi_ref) ** 2 * (ip / ref.ip_ref)


def heralded_rate(xi_s, de_n, de_s):
    """Signal photons per second inside the nuclear linewidth."""
    if not (de_n >= 0 and de_s > 0):
        raise DomainError("bandwidths must be non-negative and de_s > 0")
    if de_n > de_s:
        raise DomainError("nuclear linewidth exceeds the source bandwidth")
    return xi_s * de_n / de_s


@dataclass(frozen=True)
class RateReport:
    chi: float
    chi_gaussian: float
    pump_density: float
    pump_density_quoted: float
    signal_flux: float
    heralded_rate: float
    signal_flux_scaled: float
    heralded_rate_scaled: float

    def rows(self):
        """(quantity, value, unit, flag) tuples in a fixed order."""
        ip_flag = ""
        if not math.isclose(self.pump_density, self.pump_density_quoted, rel_tol=0.05):
            ip_flag = f"paper_claims={self.pump_density_quoted:.2g}"
        rate_flag = ""
        if not math.isclose(self.heralded_rate, QUOTED_RATE, rel_tol=0.5):
            rate_flag = "paper_claims=~1 Hz"
        return [
            ("chi2_111", self.chi, "C/N", ""),
            ("chi2_111_gaussian", self.chi_gaussian, "statC/dyn", ""),
            ("pump_density", self.pump_density, "photons/s/mm^2", ip_flag),
            ("signal_flux", self.signal_flux, "photons/s", "reference anchor"),
            ("heralded_rate", self.heralded_rate, "Hz", rate_flag),
            ("signal_flux_scaled", self.signal_flux_scaled, "photons/s", "computed chi and pump density"),
            ("heralded_rate_scaled", self.heralded_rate_scaled, "Hz", "computed chi and pump density"),
        ]


def rate_report(xpdc=None, pump=None, ref=None, linewidth_ev=FE57_LINEWIDTH_EV):
    """Evaluate every rate quantity with the defaults of the 57Fe scheme.

    ``heralded_rate`` uses the anchor flux ``ref.xi_ref``; the ``*_scaled``
    entries propagate the computed chi and pump density through the
    scaling law instead.
    """
    xpdc = xpdc or XPDCParams()
    pump = pump or PumpParams()
    ref = ref or SourceReference()
    chi = chi2_111(xpdc)
    ip = pump_density(pump)
    xi = signal_flux(ref, ref.chi_ref, ref.ip_ref)
    xi_scaled = signal_flux(ref, chi, ip)
    return RateReport(
        chi=chi,
        chi_gaussian=si_to_gaussian_chi2(chi),
        pump_density=ip,
        pump_density_quoted=QUOTED_PUMP_DENSITY,
        signal_flux=xi,
        heralded_rate=heralded_rate(xi, linewidth_ev, ref.bandwidth),
        signal_flux_scaled=xi_scaled,
        heralded_rate_scaled=heralded_rate(xi_scaled, linewidth_ev, ref.bandwidth),
    )
