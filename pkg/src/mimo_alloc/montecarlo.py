"""Link-level simulation of pilot-contaminated MMSE estimation and MRC.

Used to check that the closed-form rate is an achievable lower bound on
the ergodic rate.  Only the centre cell is detected; other cells are pure
interferers.  Pilot transmission is not simulated symbol by symbol: the
despread pilot observation is generated directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPilot
from .geometry import FadingSnapshot, Seed, substream
from .spectral import LOG2E, PowerAllocation

# trials per RNG substream; fixed so results do not depend on batching
BLOCK_TRIALS = 250


@dataclass(frozen=True)
class ChannelRealization:
    """``G[..., l, i, :, k]`` is the channel from terminal k of cell i to BS l."""

    G: np.ndarray


@dataclass(frozen=True)
class MrcDecomposition:
    """The four terms of the MRC output for every centre-cell terminal."""

    desired: np.ndarray
    intra: np.ndarray
    inter: np.ndarray
    noise: np.ndarray
    received: np.ndarray

    def total(self) -> np.ndarray:
        return self.desired + self.intra + self.inter + self.noise


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Per-terminal ergodic-rate estimate (arrays of length K)."""

    mean: np.ndarray
    std_error: np.ndarray
    trials: int


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples: independent real and imaginary parts of variance 1/2."""
    shape = tuple(np.atleast_1d(shape))
    pairs = rng.standard_normal(shape + (2,))
    pairs *= np.sqrt(0.5)
    return pairs.view(np.complex128)[..., 0]


def draw_channels(snapshot: FadingSnapshot, N: int, seed: Seed, trials: int | None = None) -> ChannelRealization:
    """Rayleigh small-scale fading scaled by the large-scale gains.

    With ``trials`` a leading axis of that length is added.
    """
    rng = np.random.default_rng(substream(seed))
    L, _, K = snapshot.beta.shape
    shape = (L, L, N, K) if trials is None else (trials, L, L, N, K)
    h = complex_normal(rng, shape)
    return ChannelRealization(h * np.sqrt(snapshot.beta)[:, :, None, :])


def _estimate(G_center: np.ndarray, beta_center: np.ndarray, center: int, tau: int, p_p: float, w: np.ndarray):
    """MMSE estimate from the channels towards one BS, ``G_center[..., i, :, k]``."""
    if not p_p > 0:
        raise InvalidPilot(f"pilot power must be positive, got {p_p}")
    x = tau * p_p
    scale = beta_center[center] / (beta_center.sum(axis=0) + 1.0 / x)
    return scale * (G_center.sum(axis=-3) + w / np.sqrt(x))


def mmse_estimate(
    realization: ChannelRealization,
    snapshot: FadingSnapshot,
    tau: int,
    p_p: float,
    center: int = 0,
    seed: Seed = 0,
) -> np.ndarray:
    """Estimates of the centre BS's own-cell channels, shape (..., N, K).

    All cells reuse the same pilots, so the observation for terminal k is
    the sum of the k-th channels of every cell plus fresh noise.
    """
    if not p_p > 0:
        raise InvalidPilot(f"pilot power must be positive, got {p_p}")
    G_center = realization.G[..., center, :, :, :]
    rng = np.random.default_rng(substream(seed))
    w = complex_normal(rng, G_center.shape[:-3] + G_center.shape[-2:])
    return _estimate(G_center, snapshot.beta[center], center, tau, p_p, w)


def mrc_detect(
    realization: ChannelRealization,
    estimates: np.ndarray,
    p_u: float,
    seed: Seed = 0,
    center: int = 0,
) -> MrcDecomposition:
    """Combine the received vector with the conjugate estimates.

    Unit-power symbols and unit-variance noise are drawn from ``seed``; the
    received signal is formed explicitly so that ``received`` can be checked
    against the sum of the four terms.
    """
    if p_u < 0:
        raise ValueError("data power must be non-negative")
    G = realization.G[..., center, :, :, :]  # (..., L, N, K)
    L, N, K = G.shape[-3:]
    batch = G.shape[:-3]
    rng = np.random.default_rng(substream(seed))
    x = complex_normal(rng, batch + (L, K))
    n = complex_normal(rng, batch + (N,))
    amp = np.sqrt(p_u)

    # cross[..., k, i, j] = est_k^H g_{center i j}
    est_h = np.conj(np.swapaxes(estimates, -1, -2))  # (..., K, N)
    flat = np.moveaxis(G, -3, -2).reshape(batch + (N, L * K))
    cross = (est_h @ flat).reshape(batch + (K, L, K))
    terms = amp * cross * x[..., None, :, :]

    own = terms[..., center, :]  # (..., K, K)
    eye = np.eye(K, dtype=bool)
    desired = own[..., eye]
    intra = np.where(eye, 0, own).sum(axis=-1)
    inter = terms.sum(axis=(-2, -1)) - own.sum(axis=-1)
    noise = est_h @ n[..., None]
    noise = noise[..., 0]

    y = amp * np.einsum("...ink,...ik->...n", G, x) + n
    received = (est_h @ y[..., None])[..., 0]
    return MrcDecomposition(desired, intra, inter, noise, received)


def conditional_sinr(est: np.ndarray, beta_center: np.ndarray, center: int, tau: int, p_p: float, p_u: float) -> np.ndarray:
    """SINR of terminal k given its estimate, shape (..., K).

    The receiver knows ``est`` and nothing else; everything it cannot
    explain (other terminals, the estimation error, noise) is treated as
    noise with its variance conditioned on ``est``.  Terminals on other
    pilots are independent of ``est`` and contribute beta * |est|^2.  The
    terminals sharing pilot k are aligned with ``est`` (their estimates are
    scaled copies of it) plus an independent error, which gives the
    coherent term growing with |est|^4.  Only |est|^2 enters the result.
    ``beta_center`` is the (L, K) gain matrix towards the detecting BS.
    """
    x = tau * p_p
    norm2 = np.sum(np.abs(est) ** 2, axis=-2)
    spread = beta_center.sum(axis=0) + 1.0 / x
    own = beta_center[center]
    noncoherent = beta_center.sum() - np.sum(beta_center**2, axis=0) / spread
    coherent = np.sum((beta_center / own) ** 2, axis=0) - 1.0
    return p_u * norm2 / (p_u * (noncoherent + coherent * norm2) + 1.0)


def empirical_ergodic_rate(
    snapshot: FadingSnapshot,
    N: int,
    alloc: PowerAllocation,
    trials: int,
    seed: Seed,
    center: int = 0,
) -> MonteCarloEstimate:
    """Average of log2(1 + SINR) over independent channel realizations.

    Each trial draws the centre BS's channels and pilot noise, forms the
    MMSE estimates and evaluates :func:`conditional_sinr`.  The closed-form
    rate equals log2(1 + 1/E[1/SINR]), so by convexity it can only sit
    below this average.

    Trials are grouped in blocks of ``BLOCK_TRIALS``; block ``b`` draws from
    substream ``(seed, b)`` so any split of blocks across workers gives the
    same answer.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    beta = snapshot.beta[center]  # (L, K)
    L, K = beta.shape
    sqrt_beta = np.sqrt(beta)[:, None, :]
    rates = []
    done = 0
    block = 0
    while done < trials:
        b = min(BLOCK_TRIALS, trials - done)
        rng = np.random.default_rng(substream(seed, block))
        G = complex_normal(rng, (b, L, N, K)) * sqrt_beta
        w = complex_normal(rng, (b, N, K))
        est = _estimate(G, beta, center, alloc.tau, alloc.p_p, w)
        rates.append(np.log1p(conditional_sinr(est, beta, center, alloc.tau, alloc.p_p, alloc.p_u)) * LOG2E)
        done += b
        block += 1
    rates = np.concatenate(rates)
    std_error = rates.std(axis=0, ddof=1) / np.sqrt(trials)
    return MonteCarloEstimate(mean=rates.mean(axis=0), std_error=std_error, trials=trials)
