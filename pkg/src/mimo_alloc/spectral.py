"""Closed-form uplink rates with MRC and pilot-contaminated MMSE estimates.

For terminal k of the centre cell the achievable rate is

    R_k = log2(1 + a tau pp pu / (b tau pp pu + c pu + d tau pp + 1))

with coefficients built from the large-scale fading towards the centre BS.
Everything here is linear scale with unit noise power.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidAntennaCount, ZeroSpectralEfficiency
from .geometry import FadingSnapshot

LOG2E = 1.0 / np.log(2.0)


@dataclass(frozen=True)
class RateCoefficients:
    """Per-terminal coefficients (a, b, c, d), each an array of length K."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        arrays = [np.atleast_1d(np.asarray(getattr(self, n), dtype=float)) for n in "abcd"]
        shapes = {x.shape for x in arrays}
        if len(shapes) != 1 or arrays[0].ndim != 1:
            raise ValueError(f"coefficient arrays must be 1-D and equally long, got {shapes}")
        for name, x in zip("abcd", arrays):
            object.__setattr__(self, name, x)

    def __len__(self) -> int:
        return len(self.a)

    def __getitem__(self, k) -> "RateCoefficients":
        return RateCoefficients(self.a[k], self.b[k], self.c[k], self.d[k])


@dataclass(frozen=True)
class PowerAllocation:
    tau: int
    p_p: float
    p_u: float

    def __post_init__(self):
        if isinstance(self.tau, bool) or int(self.tau) != self.tau:
            raise ValueError(f"tau must be an integer, got {self.tau!r}")
        if self.p_p < 0 or self.p_u < 0:
            raise ValueError("powers must be non-negative")

    def check(self, K: int, T: int) -> None:
        if not K <= self.tau <= T:
            raise ValueError(f"need K <= tau <= T, got tau={self.tau}, K={K}, T={T}")

    def energy(self, T: int) -> float:
        """Energy spent per coherence interval."""
        return self.tau * self.p_p + (T - self.tau) * self.p_u


@dataclass(frozen=True)
class EnergyBudget:
    """Energy ``P`` per coherence interval of ``T`` symbols."""

    P: float
    T: int

    def __post_init__(self):
        if not self.P > 0:
            raise ValueError(f"energy budget must be positive, got {self.P}")

    @property
    def snr(self) -> float:
        return self.P / self.T

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.snr)

    @classmethod
    def from_snr_db(cls, snr_db: float, T: int) -> "EnergyBudget":
        return cls(P=T * 10.0 ** (snr_db / 10.0), T=T)


def rate_coefficients(snapshot: FadingSnapshot, N: int, center: int = 0) -> RateCoefficients:
    """Coefficients for the terminals of cell ``center`` seen by its own BS."""
    if N < 2:
        raise InvalidAntennaCount(f"need at least two antennas, got {N}")
    beta = snapshot.beta[center]  # (L, K): towards BS `center`
    own = beta[center]
    sq = beta ** 2
    c_all = beta.sum()
    d = beta.sum(axis=0)
    a = own ** 2 * (N - 1)
    b = (N - 1) * (sq.sum(axis=0) - sq[center]) - sq.sum(axis=0) + c_all * d
    return RateCoefficients(a=a, b=b, c=np.full_like(d, c_all), d=d)


def sinr(coeffs: RateCoefficients, tau, p_p, p_u):
    """Effective SINR inside the log, broadcast over terminals and powers."""
    x = tau * np.asarray(p_p, dtype=float)
    p_u = np.asarray(p_u, dtype=float)
    num = coeffs.a * x * p_u
    den = coeffs.b * x * p_u + coeffs.c * p_u + coeffs.d * x + 1.0
    return num / den


def achievable_rate(coeffs: RateCoefficients, alloc: PowerAllocation) -> np.ndarray:
    """Per-terminal rate in bits/s/Hz (zero when either power is zero)."""
    return np.log1p(sinr(coeffs, alloc.tau, alloc.p_p, alloc.p_u)) * LOG2E


def sum_spectral_efficiency(coeffs: RateCoefficients, alloc: PowerAllocation, T: int) -> float:
    alloc.check(len(coeffs), T)
    return float((1.0 - alloc.tau / T) * achievable_rate(coeffs, alloc).sum())


def low_snr_fixed_pilot_slope(coeffs: RateCoefficients, tau: int, p_p: float, T: int) -> float:
    """dS/dp_u at p_u = 0 for a pilot power held fixed."""
    x = tau * p_p
    return float(LOG2E * (1.0 - tau / T) * np.sum(coeffs.a * x / (coeffs.d * x + 1.0)))


def low_snr_equal_power_curvature(coeffs: RateCoefficients, tau: int, T: int) -> float:
    """Coefficient of p_u**2 in S when p_p = p_u (the squaring effect)."""
    return float(LOG2E * (1.0 - tau / T) * np.sum(coeffs.a * tau))


def bit_energy(alloc: PowerAllocation, T: int, S: float) -> float:
    """Average transmit power per symbol divided by the sum spectral efficiency."""
    if not S > 0:
        raise ZeroSpectralEfficiency("bit energy is undefined at zero spectral efficiency")
    frac = alloc.tau / T
    return (frac * alloc.p_p + (1.0 - frac) * alloc.p_u) / S
