"""Golden-section maximisation on a bracket, vectorised over many brackets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INVPHI2 = 1.0 - INVPHI


@dataclass
class SearchResult:
    x: np.ndarray
    fx: np.ndarray
    iterations: int
    width: np.ndarray


def golden_iterations(rtol: float) -> int:
    """Iterations needed to shrink a bracket by the factor ``rtol``."""
    return max(0, math.ceil(math.log(rtol) / math.log(INVPHI)))


def golden_section_maximize(f, lo, hi, rtol=1e-8, refine=True) -> SearchResult:
    """Maximise a unimodal ``f`` on ``[lo, hi]``.

    ``f`` maps an array of abscissae (one per bracket) to an array of
    values.  Every bracket is shrunk to ``rtol`` times its initial width;
    the iteration count is the same for all of them, so the result does not
    depend on how brackets are batched.  With ``refine`` a parabola is
    fitted through the best three points of the final bracket and its
    vertex kept when it improves on the best golden point.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()

    f_lo, f_hi = f(lo), f(hi)
    x1 = lo + INVPHI2 * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    n = golden_iterations(rtol)
    for _ in range(n):
        left = f1 >= f2  # max lies in [lo, x2]
        # shrink from the right
        hi = np.where(left, x2, hi)
        f_hi = np.where(left, f2, f_hi)
        # shrink from the left
        lo = np.where(left, lo, x1)
        f_lo = np.where(left, f_lo, f1)
        new_x = np.where(left, lo + INVPHI2 * (hi - lo), lo + INVPHI * (hi - lo))
        f_new = f(new_x)
        x2, f2, x1, f1 = (
            np.where(left, x1, new_x),
            np.where(left, f1, f_new),
            np.where(left, new_x, x2),
            np.where(left, f_new, f2),
        )

    left = f1 >= f2
    x_best = np.where(left, x1, x2)
    f_best = np.where(left, f1, f2)
    if refine:
        # triple bracketing the best point
        xa = np.where(left, lo, x1)
        fa = np.where(left, f_lo, f1)
        xc = np.where(left, x2, hi)
        fc = np.where(left, f2, f_hi)
        xv = _parabola_vertex(xa, fa, x_best, f_best, xc, fc)
        ok = np.isfinite(xv) & (xv > xa) & (xv < xc)
        xv = np.where(ok, xv, x_best)
        fv = f(xv)
        better = ok & (fv >= f_best)
        x_best = np.where(better, xv, x_best)
        f_best = np.where(better, fv, f_best)
    return SearchResult(x=x_best, fx=f_best, iterations=n, width=hi - lo)


def _parabola_vertex(xa, fa, xb, fb, xc, fc):
    num = (xb - xa) ** 2 * (fb - fc) - (xb - xc) ** 2 * (fb - fa)
    den = (xb - xa) * (fb - fc) - (xb - xc) * (fb - fa)
    with np.errstate(divide="ignore", invalid="ignore"):
        return xb - 0.5 * num / den
