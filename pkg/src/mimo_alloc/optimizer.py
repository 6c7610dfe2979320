"""Joint pilot/data power and training-length allocation.

The joint program over (tau, p_p, p_u) under the energy equality
``tau p_p + (T - tau) p_u = P`` is solved by fixing ``tau = K`` and
eliminating the pilot power, which leaves a concave problem in ``p_u`` on
``[0, P / (T - K)]``.  ``solve_p1_bruteforce`` keeps ``tau`` free and is
used as an oracle for that reduction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteObjective, OutOfBracket
from .search import golden_section_maximize
from .spectral import (
    LOG2E,
    PowerAllocation,
    RateCoefficients,
    bit_energy,
    sinr,
    sum_spectral_efficiency,
)

DEFAULT_TOL = 1e-8
# slack for round-off when a caller passes a computed bracket end
_EDGE_SLACK = 1e-12


@dataclass(frozen=True)
class AllocationSolution:
    tau_star: int
    p_p_star: float
    p_u_star: float
    s_star: float
    eta_star: float
    iterations: int = 0
    bracket_width: float = 0.0

    @property
    def allocation(self) -> PowerAllocation:
        return PowerAllocation(self.tau_star, self.p_p_star, self.p_u_star)

    @property
    def pilot_data_ratio(self) -> float:
        """p_p / p_u (inf when no data power is used)."""
        if self.p_u_star == 0:
            return np.inf if self.p_p_star > 0 else np.nan
        return self.p_p_star / self.p_u_star

    def training_energy_ratio(self, T: int) -> float:
        """Pilot energy over data energy in one coherence interval."""
        data = (T - self.tau_star) * self.p_u_star
        if data == 0:
            return np.inf if self.p_p_star > 0 else np.nan
        return self.tau_star * self.p_p_star / data

    def budget_error(self, P: float, T: int) -> float:
        """Relative violation of the energy equality."""
        spent = self.tau_star * self.p_p_star + (T - self.tau_star) * self.p_u_star
        return abs(spent - P) / P if P > 0 else abs(spent)


def bracket_upper(P: float, T: int, tau: int) -> float:
    return P / (T - tau)


def pilot_power_from_data_power(p_u, P: float, T: int, K: int):
    """Pilot power that exhausts the budget at ``tau = K``."""
    p_u = np.asarray(p_u, dtype=float)
    upper = bracket_upper(P, T, K)
    if np.any(p_u < 0) or np.any(p_u > upper * (1 + _EDGE_SLACK)):
        raise OutOfBracket(f"p_u must lie in [0, {upper}]")
    p_p = np.maximum((P - (T - K) * p_u) / K, 0.0)
    return p_p if p_p.ndim else float(p_p)


def _objective(coeffs: RateCoefficients, P, T, tau, p_u):
    """Sum SE along the budget line for arrays of (tau, p_u); no checks."""
    tau = np.asarray(tau, dtype=float)
    p_u = np.asarray(p_u, dtype=float)
    p_p = np.maximum((P - (T - tau) * p_u) / tau, 0.0)
    g = sinr(coeffs, tau[..., None], p_p[..., None], p_u[..., None])
    return (1.0 - tau / T) * np.log1p(g).sum(axis=-1) * LOG2E


def objective_p2(p_u, coeffs: RateCoefficients, P: float, T: int, K: int):
    """Sum spectral efficiency at ``tau = K`` with the pilot power eliminated."""
    pilot_power_from_data_power(p_u, P, T, K)  # bracket check
    s = _objective(coeffs, P, T, K, np.asarray(p_u, dtype=float))
    return s if np.ndim(s) else float(s)


def f_k(p_u, coeffs: RateCoefficients, P: float, T: int, K: int):
    """Per-terminal SINR along the budget line; broadcasts ``p_u`` against coefficients."""
    t_hat = T - K
    x = P - t_hat * p_u
    return coeffs.a * x * p_u / (coeffs.b * x * p_u + coeffs.c * p_u + coeffs.d * x + 1.0)


def f_k_second_derivative(p_u, coeffs: RateCoefficients, P: float, T: int, K: int):
    """Second derivative of ``f_k`` in closed form.

    The cubic below equals ``omega * f_k''`` with
    ``omega = D**3 / (2 a)`` and ``D`` the denominator of ``f_k``; it is
    non-positive on the whole bracket, which is what makes the reduced
    problem concave.
    """
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    t_hat = T - K
    p = np.asarray(p_u, dtype=float)
    dP1 = d * P + 1.0
    cubic = (
        -b * t_hat**2 * (c - d * t_hat) * p**3
        - 3.0 * b * t_hat**2 * dP1 * p**2
        + 3.0 * b * t_hat * P * dP1 * p
        - dP1 * (b * P**2 + c * P + t_hat)
    )
    x = P - t_hat * p
    den = b * x * p + c * p + d * x + 1.0
    omega = den**3 / (2.0 * a)
    return cubic / omega


def _zero_solution(K: int) -> AllocationSolution:
    return AllocationSolution(tau_star=K, p_p_star=0.0, p_u_star=0.0, s_star=0.0, eta_star=np.nan)


def _checked(f):
    def wrapped(x):
        y = f(x)
        if not np.all(np.isfinite(y)):
            raise NonFiniteObjective("objective evaluated to a non-finite value")
        return y

    return wrapped


def _finish(coeffs, P, T, tau, p_u, iterations, width) -> AllocationSolution:
    p_u = float(p_u)
    p_p = max((P - (T - tau) * p_u) / tau, 0.0)
    alloc = PowerAllocation(int(tau), p_p, p_u)
    s = sum_spectral_efficiency(coeffs, alloc, T)
    eta = bit_energy(alloc, T, s) if s > 0 else np.nan
    return AllocationSolution(int(tau), p_p, p_u, s, eta, iterations, float(width))


def solve_p2(coeffs: RateCoefficients, P: float, T: int, K: int, tol: float = DEFAULT_TOL) -> AllocationSolution:
    """Optimal data power at ``tau = K`` by golden-section search.

    The bracket ``[0, P / (T - K)]`` is shrunk to ``tol`` times its width
    and finished with one parabolic step.  Concavity makes the result the
    global optimum.  ``P = 0`` yields the all-zero allocation.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if P < 0:
        raise ValueError("energy budget must be non-negative")
    if P == 0:
        return _zero_solution(K)
    upper = bracket_upper(P, T, K)
    if np.all(coeffs.a == 0):
        return _finish(coeffs, P, T, K, upper / 2, 0, upper)
    res = golden_section_maximize(
        _checked(lambda x: _objective(coeffs, P, T, K, x)), 0.0, upper, rtol=tol
    )
    return _finish(coeffs, P, T, K, res.x[0], res.iterations, res.width[0])


def best_rate_per_tau(coeffs: RateCoefficients, P: float, T: int, K: int, tol: float = DEFAULT_TOL):
    """Inner optimum for every integer ``tau`` in ``[K, T - 1]``.

    Returns ``(taus, p_u, s)`` arrays.  ``tau = T`` is left out: it has no
    data symbols and therefore zero spectral efficiency.
    """
    taus = np.arange(K, T)
    if P == 0:
        return taus, np.zeros(len(taus)), np.zeros(len(taus))
    uppers = P / (T - taus)
    res = golden_section_maximize(
        _checked(lambda x: _objective(coeffs, P, T, taus, x)), np.zeros(len(taus)), uppers, rtol=tol
    )
    return taus, res.x, res.fx


def solve_p1_bruteforce(coeffs: RateCoefficients, P: float, T: int, K: int, tol: float = DEFAULT_TOL) -> AllocationSolution:
    """Search every training length, solving the 1-D power split for each."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if P < 0:
        raise ValueError("energy budget must be non-negative")
    if P == 0:
        return _zero_solution(K)
    taus, p_u, s = best_rate_per_tau(coeffs, P, T, K, tol)
    j = int(np.argmax(s))  # first maximum: ties go to the shorter training
    return _finish(coeffs, P, T, taus[j], p_u[j], 0, 0.0)


def equal_power_baseline(coeffs: RateCoefficients, P: float, T: int, K: int) -> AllocationSolution:
    """Same power for pilots and data, ``p_p = p_u = P / T``, at ``tau = K``."""
    p = P / T
    alloc = PowerAllocation(K, p, p)
    s = sum_spectral_efficiency(coeffs, alloc, T)
    eta = bit_energy(alloc, T, s) if s > 0 else np.nan
    return AllocationSolution(K, p, p, s, eta)
