"""Leading-order entropy-energy curves for the ground+top two-block family.

For a dense spectrum bounded by ``e_max`` whose level density grows
polynomially (c * E**a) or exponentially (exp(b*E)), the extremal passive
state degenerates to a mixture of the ground state with the flat state
filled up to ``e_max``.  These closed forms drop the O(1/N) and
O(exp(-b*e_max)) remainders, so comparisons against exact solvers should
use tolerances that shrink with system size rather than strict equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DosModel:
    """Density-of-states model: polynomial(a, c) or exponential(b), capped at e_max."""

    kind: str
    e_max: float
    a: float = 0.0
    c: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("polynomial", "exponential"):
            raise ValueError(f"unknown DOS kind {self.kind!r}")
        if not self.e_max > 0:
            raise ValueError(f"energy ceiling must be positive, got {self.e_max}")
        if self.kind == "polynomial":
            if self.a < 0:
                raise ValueError(f"polynomial exponent must be >= 0, got {self.a}")
            if not self.c > 0:
                raise ValueError(f"DOS prefactor must be positive, got {self.c}")
        elif not self.b > 0:
            raise ValueError(f"DOS rate must be positive, got {self.b}")

    @classmethod
    def polynomial(cls, a: float, c: float, e_max: float) -> "DosModel":
        return cls(kind="polynomial", e_max=e_max, a=a, c=c)

    @classmethod
    def exponential(cls, b: float, e_max: float) -> "DosModel":
        return cls(kind="exponential", e_max=e_max, b=b)

    def log_count(self) -> float:
        """ln of the total number of levels below e_max."""
        if self.kind == "polynomial":
            return math.log(self.c / (self.a + 1.0)) + (1.0 + self.a) * math.log(self.e_max)
        x = self.b * self.e_max
        # ln((e^x - 1)/b), stable for both small and large x
        return x + math.log1p(-math.exp(-x)) - math.log(self.b)


def binary_entropy(lam: float) -> float:
    """H(lam) = -lam ln lam - (1-lam) ln(1-lam); exactly 0 at the endpoints."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"binary entropy needs an argument in [0, 1], got {lam}")
    if lam == 0.0 or lam == 1.0:
        return 0.0
    return -lam * math.log(lam) - (1.0 - lam) * math.log1p(-lam)


def sigma0_energy(model: DosModel, lam: float) -> float:
    """Energy of (1-lam)|ground> + lam * (flat up to e_max), leading order.

    Polynomial: lam * (a+1)/(a+2) * e_max.  Exponential: lam * (e_max - 1/b),
    dropping the O(exp(-b*e_max)) remainder.
    """
    _check_weight(lam)
    if model.kind == "polynomial":
        return lam * (model.a + 1.0) / (model.a + 2.0) * model.e_max
    return lam * (model.e_max - 1.0 / model.b)


def sigma0_entropy(model: DosModel, lam: float) -> float:
    """Entropy H(lam) + lam * ln(N) of the ground+top mixture, leading order."""
    _check_weight(lam)
    return binary_entropy(lam) + lam * model.log_count()


def s_of_e(model: DosModel, e_target: float) -> float:
    """Entropy of the ground+top family as a function of its energy.

    The energy is linear in the mixing weight, so the inversion is exact;
    the entropy keeps the leading-order form.
    """
    top = sigma0_energy(model, 1.0)
    if not -1e-12 <= e_target <= top * (1.0 + 1e-12):
        raise ValueError(f"energy {e_target} outside [0, {top}]")
    lam = min(max(e_target / top, 0.0), 1.0)
    return sigma0_entropy(model, lam)


def _check_weight(lam: float):
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixing weight must be in [0, 1], got {lam}")
