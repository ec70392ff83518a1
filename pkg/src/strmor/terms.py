"""Scalar frequency functions g(s) that weight the constant matrices of a
frequency-affine system.

Every term knows its value, its analytic derivative and whether it obeys the
reflection principle ``conj(g(s)) == g(conj(s))``.
"""

import cmath
from dataclasses import dataclass

from .errors import SingularTermPoint

_AXIS_TOL = 1e-14


def _on_real_axis(s):
    return abs(s.imag) <= _AXIS_TOL * max(1.0, abs(s))


class ScalarTerm:
    kind = None

    def value(self, s):
        raise NotImplementedError

    def derivative(self, s):
        raise NotImplementedError

    @property
    def is_real(self):
        return True

    @property
    def params(self):
        return {}

    def to_dict(self):
        return {"kind": self.kind, "params": self.params}

    def __call__(self, s):
        return self.value(s)


@dataclass(frozen=True)
class Constant(ScalarTerm):
    kind = "constant"

    def value(self, s):
        return 1.0 + 0j

    def derivative(self, s):
        return 0j


@dataclass(frozen=True)
class Monomial(ScalarTerm):
    power: int = 1
    kind = "monomial"

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 1:
            raise ValueError(f"monomial power must be a positive integer, got {self.power}")

    def value(self, s):
        return complex(s) ** self.power

    def derivative(self, s):
        return self.power * complex(s) ** (self.power - 1)

    @property
    def params(self):
        return {"power": int(self.power)}


@dataclass(frozen=True)
class ExpDelay(ScalarTerm):
    """``exp(-tau*s)``."""

    tau: float = 1.0
    kind = "exp_delay"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"delay tau must be positive, got {self.tau}")

    def _exp(self, s):
        try:
            return cmath.exp(-self.tau * complex(s))
        except OverflowError as exc:
            raise SingularTermPoint(f"exp(-{self.tau}*s) overflows at s={s}") from exc

    def value(self, s):
        return self._exp(s)

    def derivative(self, s):
        return -self.tau * self._exp(s)

    @property
    def params(self):
        return {"tau": float(self.tau)}


@dataclass(frozen=True)
class FractionalKelvin(ScalarTerm):
    """Fractional Kelvin-Voigt shear modulus ``(G0 + Ginf (s tau)^a) / (1 + (s tau)^a)``.

    Uses the principal branch of the fractional power; the closed negative
    real axis (including 0) is rejected.
    """

    g0: float
    ginf: float
    tau: float
    alpha: float
    kind = "fractional_kelvin"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")

    def _power(self, s):
        s = complex(s)
        if _on_real_axis(s) and s.real <= 0:
            raise SingularTermPoint(f"fractional power evaluated on its branch cut at s={s}")
        z = (s * self.tau) ** self.alpha
        if abs(1 + z) <= 1e-14 * max(1.0, abs(z)):
            raise SingularTermPoint(f"fractional Kelvin term has a pole at s={s}")
        return s, z

    def value(self, s):
        _, z = self._power(s)
        return (self.g0 + self.ginf * z) / (1 + z)

    def derivative(self, s):
        s, z = self._power(s)
        dz = self.alpha * z / s
        return (self.ginf - self.g0) * dz / (1 + z) ** 2

    @property
    def params(self):
        return {"g0": float(self.g0), "ginf": float(self.ginf),
                "tau": float(self.tau), "alpha": float(self.alpha)}


@dataclass(frozen=True)
class SqrtShift(ScalarTerm):
    """``i * (s^2 - cutoff^2)^(1/2)`` (the ``i`` is optional).

    The root is taken as ``sqrt(s - c) * sqrt(s + c)`` with principal square
    roots, so the cut is the real segment ``[-c, c]`` and the imaginary axis
    is regular. For ``c = 0`` the root is ``s`` itself.
    """

    cutoff: float = 0.0
    imaginary_unit_factor: bool = True
    kind = "sqrt_shift"

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")

    def _root(self, s):
        s = complex(s)
        c = self.cutoff
        if c == 0:
            return s, 1.0 + 0j
        if _on_real_axis(s) and abs(s.real) <= c:
            raise SingularTermPoint(f"square-root term evaluated on its branch cut at s={s}")
        root = cmath.sqrt(s - c) * cmath.sqrt(s + c)
        return root, s / root

    @property
    def _factor(self):
        return 1j if self.imaginary_unit_factor else 1.0

    def value(self, s):
        return self._factor * self._root(s)[0]

    def derivative(self, s):
        return self._factor * self._root(s)[1]

    @property
    def is_real(self):
        return not self.imaginary_unit_factor

    @property
    def params(self):
        return {"cutoff": float(self.cutoff),
                "imaginary_unit_factor": bool(self.imaginary_unit_factor)}


TERM_KINDS = {
    "constant": Constant,
    "monomial": Monomial,
    "exp_delay": ExpDelay,
    "fractional_kelvin": FractionalKelvin,
    "sqrt_shift": SqrtShift,
}


def term_from_dict(d):
    """Inverse of :meth:`ScalarTerm.to_dict`."""
    try:
        cls = TERM_KINDS[d["kind"]]
    except KeyError as exc:
        raise ValueError(f"unknown scalar term kind {d.get('kind')!r}") from exc
    return cls(**d.get("params", {}))
