"""Linear stability of equilibria under the adjustment dynamics.

The Jacobian of df/dt = 24 k_f f (1 - f) dE/df is assembled in frequency
coordinates (the log-odds chart is singular at boundary equilibria).  The
multilinear structure gives it in closed form: own-player second partials
vanish, so the diagonal entry is k_f (1 - 2f) g_f with g_f the scaled
gradient, and cross-player entries are k_f f (1 - f) times constant or
single-frequency coefficients.

Unstable families (2, 3, 6, 7, 8) show an eigenvalue with positive real
part; the remaining families (1, 4, 5, 9, 10) have spectra on the
imaginary axis: purely oscillatory conjugate pairs plus zero modes from
free parameters, i.e. a centre manifold rather than asymptotic stability.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import analytic_ev, catalog
from .dynamics import gains_array
from .game_model import StrategyProfile, check_pot

__all__ = [
    "NoConvergence",
    "StabilityReport",
    "Verdict",
    "classify_equilibrium",
    "eigenvalues",
    "jacobian",
]

RE_TOL = 1e-7
IM_TOL = 1e-9


class NoConvergence(RuntimeError):
    """The eigenvalue iteration failed to converge."""


class Verdict(enum.Enum):
    UNSTABLE = "Unstable"
    CENTRE_MANIFOLD_STABLE = "CentreManifoldStable"


def jacobian(profile: StrategyProfile, pot: float, gains=None) -> np.ndarray:
    """11x11 Jacobian of the frequency-coordinate dynamics at ``profile``.

    Boundary coordinates are fine here: at f = 0 the row reduces to the
    one-sided rate k_f * g_f on the diagonal, and at f = 1 to -k_f * g_f.
    """
    pot = check_pot(pot)
    k = gains_array(gains)
    f = np.array(profile.as_tuple())
    g = np.array(analytic_ev.gradient_scaled(profile, pot))
    H = analytic_ev.gradient_cross(profile, pot)
    J = (k * f * (1.0 - f))[:, None] * H
    J[np.diag_indices(11)] += k * (1.0 - 2.0 * f) * g
    return J


def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Full complex spectrum of a real square matrix.

    Backed by LAPACK's dense nonsymmetric solver (balancing, Hessenberg
    reduction, shifted QR); raises :class:`NoConvergence` if the iteration
    fails.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


@dataclass(frozen=True)
class StabilityReport:
    """Spectrum of the linearisation at an equilibrium with its verdict.

    ``oscillatory_pairs`` counts conjugate pairs on the imaginary axis
    (|Re| <= re_tol, |Im| > im_tol); ``zero_modes`` counts eigenvalues with
    |lambda| <= re_tol (free-parameter directions).
    """

    solution_id: str
    pot: float
    eigenvalues: tuple
    max_real_part: float
    oscillatory_pairs: int
    zero_modes: int
    verdict: Verdict
    re_tol: float = RE_TOL
    im_tol: float = IM_TOL

    def to_json(self) -> dict:
        return {
            "solution": self.solution_id,
            "pot": self.pot,
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "max_real_part": self.max_real_part,
            "oscillatory_pairs": self.oscillatory_pairs,
            "zero_modes": self.zero_modes,
            "verdict": self.verdict.value,
            "re_tol": self.re_tol,
            "im_tol": self.im_tol,
        }


def classify_equilibrium(sol_id: str, pot: float, free_params=None,
                         gains=None, re_tol: float = RE_TOL,
                         im_tol: float = IM_TOL) -> StabilityReport:
    """Linear stability report for a catalog solution at ``pot``."""
    profile = catalog.instantiate(sol_id, pot, free_params)
    lam = eigenvalues(jacobian(profile, pot, gains))
    order = np.argsort(-lam.real)
    lam = lam[order]
    max_re = float(lam.real.max())
    pairs = int(np.count_nonzero((np.abs(lam.real) <= re_tol)
                                 & (lam.imag > im_tol)))
    zeros = int(np.count_nonzero(np.abs(lam) <= re_tol))
    verdict = (Verdict.UNSTABLE if max_re > re_tol
               else Verdict.CENTRE_MANIFOLD_STABLE)
    return StabilityReport(sol_id, float(pot), tuple(lam), max_re, pairs,
                           zeros, verdict, re_tol, im_tol)
