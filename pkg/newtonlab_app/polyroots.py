import logging

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import config
from .errors import RootSolverError

logger = logging.getLogger(__name__)

# Coefficients at or below this fraction of the largest one count as zeros.
# Exact zeros only: tiny legitimate coefficients appear in sampled families.
ZERO_COEFF = 0.0


def _significant(coeffs: np.ndarray) -> tuple[int, int]:
    """Index range [low, high] of coefficients that are not negligible."""
    mags = np.abs(coeffs)
    scale = mags.max() if mags.size else 0.0
    if scale == 0.0:
        raise RootSolverError("zero polynomial has no finite root set")
    keep = np.nonzero(mags > ZERO_COEFF * scale)[0]
    return int(keep[0]), int(keep[-1])


def degree(coeffs) -> int:
    c = np.asarray(coeffs, dtype=complex)
    if not np.any(np.abs(c) > 0):
        return -1
    return _significant(c)[1]


def backward_error(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|p(z)| relative to sum |c_i||z|^i (zero for an exact root)."""
    num = np.abs(npoly.polyval(z, coeffs))
    den = npoly.polyval(np.abs(z), np.abs(coeffs))
    den = np.where(den == 0.0, 1.0, den)
    return num / den


def _aberth(coeffs: np.ndarray, z: np.ndarray, max_iter: int = 60) -> np.ndarray:
    deriv = npoly.polyder(coeffs)
    z = z.copy()
    n = z.size
    if n < 2:
        return z
    for _ in range(max_iter):
        p = npoly.polyval(z, coeffs)
        dp = npoly.polyval(z, deriv)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, 0.0)
        trial = z - step
        # only accept steps that do not worsen the residual
        better = backward_error(coeffs, trial) <= backward_error(coeffs, z)
        z = np.where(better, trial, z)
        if np.all(np.abs(np.where(better, step, 0.0)) <= 1e-15 * (1.0 + np.abs(z))):
            break
    return z


def poly_roots(coeffs) -> np.ndarray:
    """All finite roots of a polynomial given by ascending coefficients.

    Roots at 0 coming from exactly vanishing low coefficients are returned
    exactly. The rest come from the companion-matrix eigenvalues, polished
    by simultaneous (Aberth) Newton steps.
    """
    c = np.asarray(coeffs, dtype=complex)
    low, high = _significant(c)
    zeros = np.zeros(low, dtype=complex)
    core = c[low:high + 1]
    n = core.size - 1
    if n == 0:
        return zeros
    if n == 1:
        return np.concatenate([zeros, [-core[0] / core[1]]])

    seeds = np.linalg.eigvals(npoly.polycompanion(core))
    roots = _aberth(core, seeds)

    err = backward_error(core, roots)
    bad = err > np.sqrt(config.ROOT_RESIDUAL)
    if np.any(bad):
        raise RootSolverError(
            f"root refinement did not converge for {int(bad.sum())} of {n} roots "
            f"(max backward error {err.max():.2e})",
            partial_roots=list(roots[~bad]),
        )
    if np.any(err > config.ROOT_RESIDUAL):
        logger.debug("root residual %.2e above target %.0e", err.max(), config.ROOT_RESIDUAL)
    return np.concatenate([zeros, roots])


def cluster(points, tol: float) -> list[tuple[complex, int]]:
    """Group points closer than tol (relative to max(1, |z|)); mean + count."""
    remaining = [complex(p) for p in points]
    groups: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        changed = True
        while changed:
            changed = False
            for p in list(remaining):
                if any(abs(p - m) <= tol * max(1.0, abs(m)) for m in members):
                    members.append(p)
                    remaining.remove(p)
                    changed = True
        groups.append((complex(np.mean(members)), len(members)))
    return groups
