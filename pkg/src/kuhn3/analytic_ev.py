"""Closed-form expected profits and their exact partial derivatives.

The scaled profits 24*E_i are multilinear polynomials in the eleven
frequencies (no frequency appears squared, and no product of two
frequencies owned by the same player occurs).  Two consequences are used
throughout the package:

* each E_i is jointly affine in player i's own frequencies, so the partial
  derivative of E_i with respect to one of her frequencies depends only on
  the opponents' frequencies (and the pot), and a best response decomposes
  coordinatewise;
* every second partial is a constant or an affine function of a single
  other frequency, so the Jacobian of the adjustment dynamics is available
  in closed form (:func:`gradient_cross`).

Polynomials are written in the grouped form {coefficient} * own-frequency
so each brace can be audited against the tree-walk oracle term by term.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .game_model import FREQ_NAMES, ProfitVector, StrategyProfile, check_pot

__all__ = [
    "GradientVector",
    "expected_profit",
    "expected_profit_scaled",
    "gradient",
    "gradient_cross",
    "gradient_scaled",
    "gradient_scaled_array",
]


class GradientVector(NamedTuple):
    """Partial derivative of the owning player's expected profit with
    respect to each frequency, in chips per unit frequency."""

    a1: float
    b1: float
    c1: float
    d1: float
    a2: float
    b2: float
    c2: float
    d2: float
    b3: float
    c3: float
    d3: float

    def as_array(self) -> np.ndarray:
        return np.array(self)


def expected_profit_scaled(profile: StrategyProfile, pot: float) -> tuple:
    """The scaled profit triple (24*E1, 24*E2, 24*E3)."""
    P = check_pot(pot)
    a1, b1, c1, d1, a2, b2, c2, d2, b3, c3, d3 = profile.as_tuple()

    e1 = ((-2 * b2 + 2 * c2 - 2 * b3 + 2 * d3 - b2 * c3) * a1
          + (2 * P - 4 - (P + 1) * (c2 + d3)) * b1
          + (b2 - 2 + (P + a2) * b3) * c1
          + ((P + 1) * b2 - 2 * a2) * d1
          + (2 - P) * b3 + (2 + c3 - P) * b2)
    e2 = ((2 * d1 + 2 * c3 - 2 * b3 - c1 * b3 - b1 * c3) * a2
          + (2 * P - 4 + 2 * a1 - (P + 1) * (c3 + d1)) * b2
          + (P * b1 - 2 * a1) * c2
          + ((P + 1) * b3 - 2 + b1) * d2
          + (2 - P + c1) * b3 + (2 - P) * b1)
    e3 = ((2 * P - 4 + 2 * a1 + 2 * a2 - (P + 1) * (c1 + d2)) * b3
          + ((P + a1) * b2 - (2 - b1) * a2) * c3
          + ((P + 1) * b1 - 2 * a1) * d3
          + (2 - P - c1) * b2 + 2 * c1 + (2 - P + c2 - d2) * b1 + 2 * d2)
    return (e1, e2, e3)


def expected_profit(profile: StrategyProfile, pot: float) -> ProfitVector:
    """Expected profit per player relative to the all-check baseline."""
    e1, e2, e3 = expected_profit_scaled(profile, pot)
    return ProfitVector(e1 / 24.0, e2 / 24.0, e3 / 24.0)


def gradient_scaled(profile: StrategyProfile, pot: float) -> tuple:
    """Scaled partials (24 * dE_i/df for the owner of each f), in the
    canonical frequency order."""
    P = check_pot(pot)
    a1, b1, c1, d1, a2, b2, c2, d2, b3, c3, d3 = profile.as_tuple()
    return (
        -2 * b2 + 2 * c2 - 2 * b3 + 2 * d3 - b2 * c3,       # a1
        2 * P - 4 - (P + 1) * (c2 + d3),                    # b1
        b2 - 2 + (P + a2) * b3,                             # c1
        (P + 1) * b2 - 2 * a2,                              # d1
        2 * d1 + 2 * c3 - 2 * b3 - c1 * b3 - b1 * c3,       # a2
        2 * P - 4 + 2 * a1 - (P + 1) * (c3 + d1),           # b2
        P * b1 - 2 * a1,                                    # c2
        (P + 1) * b3 - 2 + b1,                              # d2
        2 * P - 4 + 2 * a1 + 2 * a2 - (P + 1) * (c1 + d2),  # b3
        (P + a1) * b2 - (2 - b1) * a2,                      # c3
        (P + 1) * b1 - 2 * a1,                              # d3
    )


def gradient_scaled_array(freqs: np.ndarray, pot: float) -> np.ndarray:
    """Array-in/array-out variant of :func:`gradient_scaled` used by the
    dynamics code (no profile construction, no pot re-validation)."""
    P = float(pot)
    a1, b1, c1, d1, a2, b2, c2, d2, b3, c3, d3 = freqs
    return np.array([
        -2 * b2 + 2 * c2 - 2 * b3 + 2 * d3 - b2 * c3,
        2 * P - 4 - (P + 1) * (c2 + d3),
        b2 - 2 + (P + a2) * b3,
        (P + 1) * b2 - 2 * a2,
        2 * d1 + 2 * c3 - 2 * b3 - c1 * b3 - b1 * c3,
        2 * P - 4 + 2 * a1 - (P + 1) * (c3 + d1),
        P * b1 - 2 * a1,
        (P + 1) * b3 - 2 + b1,
        2 * P - 4 + 2 * a1 + 2 * a2 - (P + 1) * (c1 + d2),
        (P + a1) * b2 - (2 - b1) * a2,
        (P + 1) * b1 - 2 * a1,
    ])


def gradient(profile: StrategyProfile, pot: float) -> GradientVector:
    """Exact gradient dE_owner/df per frequency (chips per unit frequency)."""
    return GradientVector(*(g / 24.0 for g in gradient_scaled(profile, pot)))


def gradient_cross(profile: StrategyProfile, pot: float) -> np.ndarray:
    """11x11 matrix H with H[i, j] = d(24 * dE/df_i)/df_j.

    Row order and column order follow ``FREQ_NAMES``.  Entries for j owned
    by the same player as i are identically zero (joint affinity), so only
    cross-player couplings appear.
    """
    P = check_pot(pot)
    a1, b1, c1, d1, a2, b2, c2, d2, b3, c3, d3 = profile.as_tuple()
    idx = {n: i for i, n in enumerate(FREQ_NAMES)}
    H = np.zeros((11, 11))

    def put(row: str, col: str, val: float) -> None:
        H[idx[row], idx[col]] = val

    put("a1", "b2", -2 - c3)
    put("a1", "c2", 2.0)
    put("a1", "b3", -2.0)
    put("a1", "c3", -b2)
    put("a1", "d3", 2.0)
    put("b1", "c2", -(P + 1))
    put("b1", "d3", -(P + 1))
    put("c1", "a2", b3)
    put("c1", "b2", 1.0)
    put("c1", "b3", P + a2)
    put("d1", "a2", -2.0)
    put("d1", "b2", P + 1)
    put("a2", "b1", -c3)
    put("a2", "c1", -b3)
    put("a2", "d1", 2.0)
    put("a2", "b3", -2 - c1)
    put("a2", "c3", 2 - b1)
    put("b2", "a1", 2.0)
    put("b2", "d1", -(P + 1))
    put("b2", "c3", -(P + 1))
    put("c2", "a1", -2.0)
    put("c2", "b1", P)
    put("d2", "b1", 1.0)
    put("d2", "b3", P + 1)
    put("b3", "a1", 2.0)
    put("b3", "a2", 2.0)
    put("b3", "c1", -(P + 1))
    put("b3", "d2", -(P + 1))
    put("c3", "a1", b2)
    put("c3", "b1", a2)
    put("c3", "a2", b1 - 2)
    put("c3", "b2", P + a1)
    put("d3", "a1", -2.0)
    put("d3", "b1", P + 1)
    return H
