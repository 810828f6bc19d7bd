"""Six-vertex Boltzmann weights, electric fields, anisotropy, regime parametrization.

Conventions frozen here and used by every other module:
  * An edge variable o is 1 when the arrow points up (vertical edge) or left
    (horizontal edge), else 0.
  * A vertex reads its four edges as (o_w, o_n, o_e, o_s); the ice rule is
    o_w + o_n = o_e + o_s.
  * Fields dress a base weight by exp(H (o_w + o_e - 1)) exp(V (o_n + o_s - 1)),
    so a1 = a e^{H+V}, a2 = a e^{-H-V}, b1 = b e^{H-V}, b2 = b e^{-H+V}, c1 = c2 = c.
  * The staggered field E is fixed to zero throughout.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

__all__ = [
    "VERTEX_TYPES",
    "TYPE_NAMES",
    "VertexWeights",
    "FieldWeights",
    "delta",
    "apply_fields",
    "dress",
    "dress_xy",
    "Regime",
    "RegimeParams",
    "parametrize",
    "weights_from_regime",
    "bethe_parameters",
]

# vertex type by (o_w, o_n, o_e, o_s)
VERTEX_TYPES = {
    (1, 1, 1, 1): "a1",
    (0, 0, 0, 0): "a2",
    (1, 0, 1, 0): "b1",
    (0, 1, 0, 1): "b2",
    (1, 0, 0, 1): "c1",
    (0, 1, 1, 0): "c2",
}
TYPE_NAMES = ("a1", "a2", "b1", "b2", "c1", "c2")


@dataclass(frozen=True)
class VertexWeights:
    """The six per-type weights; entries may be floats or exact Fractions."""

    a1: object
    a2: object
    b1: object
    b2: object
    c1: object
    c2: object

    @classmethod
    def symmetric(cls, a, b, c):
        return cls(a, a, b, b, c, c)

    def as_tuple(self):
        return (self.a1, self.a2, self.b1, self.b2, self.c1, self.c2)

    def table(self):
        """Map (o_w, o_n, o_e, o_s) -> weight."""
        by_name = dict(zip(TYPE_NAMES, self.as_tuple()))
        return {occ: by_name[name] for occ, name in VERTEX_TYPES.items()}

    def scaled(self, r):
        return VertexWeights(*(r * x for x in self.as_tuple()))

    @property
    def a(self):
        return math.sqrt(self.a1 * self.a2)

    @property
    def b(self):
        return math.sqrt(self.b1 * self.b2)

    @property
    def c(self):
        return math.sqrt(self.c1 * self.c2)

    def is_exact(self):
        return all(isinstance(x, (int, Fraction)) for x in self.as_tuple())


@dataclass(frozen=True)
class FieldWeights:
    """Field-free weights (a, b, c) plus electric fields (H, V)."""

    a: float
    b: float
    c: float
    H: float = 0.0
    V: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise ValueError("weights must be positive")

    def vertex_weights(self) -> VertexWeights:
        return apply_fields(self)


def delta(a, b, c):
    """Anisotropy (a^2 + b^2 - c^2) / (2ab)."""
    if not (a > 0 and b > 0 and c > 0):
        raise ValueError("weights must be positive")
    return (a * a + b * b - c * c) / (2 * a * b)


def dress_xy(w: VertexWeights, x, y) -> VertexWeights:
    """Dress by x^{o_w+o_e-1} y^{o_n+o_s-1}; exact when all inputs are rational."""
    return VertexWeights(
        a1=w.a1 * x * y,
        a2=w.a2 / x / y,
        b1=w.b1 * x / y,
        b2=w.b2 / x * y,
        c1=w.c1,
        c2=w.c2,
    )


def dress(w: VertexWeights, H, V) -> VertexWeights:
    return dress_xy(w, math.exp(H), math.exp(V))


def apply_fields(w: FieldWeights) -> VertexWeights:
    return dress(VertexWeights.symmetric(w.a, w.b, w.c), w.H, w.V)


class Regime(str, Enum):
    FERRO_A = "FerroA"              # Delta > 1, a > b + c
    FERRO_B = "FerroB"              # Delta > 1, b > a + c
    DISORDERED_NEG = "DisorderedNeg"  # -1 < Delta <= 0
    DISORDERED_POS = "DisorderedPos"  # 0 <= Delta < 1
    ANTIFERRO = "AntiFerro"         # Delta < -1


@dataclass(frozen=True)
class RegimeParams:
    tag: Regime
    lam: float
    eta_or_gamma: float
    r: float


_DEGENERATE_TOL = 1e-12


def parametrize(a, b, c) -> RegimeParams:
    """Classify (a, b, c) into a regime and return its (lam, eta_or_gamma, r).

    Unless r is pinned by the caller via weights_from_regime, the returned r
    reproduces the input scale.  Raises on the degenerate surfaces |Delta| = 1.
    """
    d = delta(a, b, c)
    if abs(d - 1.0) < _DEGENERATE_TOL or abs(d + 1.0) < _DEGENERATE_TOL:
        raise ValueError("degenerate regime |Delta| = 1 has no open parametrization")
    if d > 1.0:
        # a = r sinh(lam + eta), b = r sinh(lam), c = r sinh(eta)  (a > b + c)
        # or the same with a and b swapped (b > a + c)
        eta = math.acosh(d)
        if a > b:
            lam = math.asinh(b * math.sinh(eta) / c)
            r = c / math.sinh(eta)
            return RegimeParams(Regime.FERRO_A, lam, eta, r)
        lam = math.asinh(a * math.sinh(eta) / c)
        r = c / math.sinh(eta)
        return RegimeParams(Regime.FERRO_B, lam, eta, r)
    if d < -1.0:
        # a = r sinh(eta - lam), b = r sinh(lam), c = r sinh(eta), 0 < lam < eta
        eta = math.acosh(-d)
        r = c / math.sinh(eta)
        # a/b = sinh(eta - lam)/sinh(lam): solve tanh from expansion
        # sinh(eta - lam) = sinh eta cosh lam - cosh eta sinh lam
        # => a/b = sinh(eta) coth(lam) - cosh(eta)
        lam = math.atanh(math.sinh(eta) / (a / b + math.cosh(eta)))
        return RegimeParams(Regime.ANTIFERRO, lam, eta, r)
    # disordered: a = r sin(gamma + phi), b = r sin(phi), c = r sin(gamma);
    # Delta = cos(gamma) covers both signs with gamma in (0, pi)
    gamma = math.acos(d)
    phi = math.atan2(math.sin(gamma), a / b - math.cos(gamma))
    r = b / math.sin(phi)
    tag = Regime.DISORDERED_NEG if d <= 0 else Regime.DISORDERED_POS
    return RegimeParams(tag, phi, gamma, r)


def weights_from_regime(rp: RegimeParams):
    """Inverse of parametrize: positive (a, b, c) for valid in-range parameters."""
    tag, lam, eg, r = rp.tag, rp.lam, rp.eta_or_gamma, rp.r
    if r <= 0:
        raise ValueError("scale r must be positive")
    if tag in (Regime.FERRO_A, Regime.FERRO_B):
        if not (lam > 0 and eg > 0):
            raise ValueError("ferro regimes need lam, eta > 0")
        hi, lo = r * math.sinh(lam + eg), r * math.sinh(lam)
        c = r * math.sinh(eg)
        return (hi, lo, c) if tag is Regime.FERRO_A else (lo, hi, c)
    if tag is Regime.ANTIFERRO:
        if not (0 < lam < eg):
            raise ValueError("antiferro regime needs 0 < lam < eta")
        return (r * math.sinh(eg - lam), r * math.sinh(lam), r * math.sinh(eg))
    # disordered, either sign: a = r sin(gamma + phi), b = r sin(phi), c = r sin(gamma)
    if not (0 < eg < math.pi):
        raise ValueError("disordered regime needs gamma in (0, pi)")
    if not (0 < lam < math.pi):
        raise ValueError("disordered regime needs phi in (0, pi)")
    if tag is Regime.DISORDERED_POS and eg > math.pi / 2 + _DEGENERATE_TOL:
        raise ValueError("DisorderedPos needs gamma <= pi/2 (Delta >= 0)")
    if tag is Regime.DISORDERED_NEG and eg < math.pi / 2 - _DEGENERATE_TOL:
        raise ValueError("DisorderedNeg needs gamma >= pi/2 (Delta <= 0)")
    a = r * math.sin(eg + lam)
    b = r * math.sin(lam)
    c = r * math.sin(eg)
    if a <= 0 or b <= 0 or c <= 0:
        raise ValueError("parameters leave the positive-weight wedge")
    return (a, b, c)


def bethe_parameters(a, b, c):
    """Map positive (a, b, c) to algebraic parameters (q, z, rho) with
    a = rho (zq - 1/(zq)), b = rho (z - 1/z); the c slot rho (q - 1/q) equals
    +-c (the sign is an alternating-diagonal gauge and does not affect spectra).
    """
    rp = parametrize(a, b, c)
    lam, eg = rp.lam, rp.eta_or_gamma
    if rp.tag is Regime.FERRO_A:
        q, z = math.exp(eg), math.exp(lam)
    elif rp.tag is Regime.FERRO_B:
        q = math.exp(-eg)
        z = math.exp(eg + math.asinh(a * math.sinh(eg) / c))
    elif rp.tag is Regime.ANTIFERRO:
        q, z = -math.exp(eg), -math.exp(-lam)
    else:
        q, z = cmath.exp(1j * eg), cmath.exp(1j * lam)
    rho = b / (z - 1 / z)
    return q, z, rho
