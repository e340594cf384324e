"""Summand distribution families and the matched normal comparison sequence.

Every built-in family is a scale family: the j-th summand is sigma_j * Z for a
fixed zero-mean, unit-variance standardized law Z and a deterministic standard
deviation profile sigma_j.  This covers the i.i.d. families (constant profile)
and the heterogeneous exploding-variance families (geometric profile), keeps
all moment and tail functionals exact, and makes the cumulative variance
closed-form even where the float64 value would overflow (log-space accessors).

CDFs follow the strict-inequality convention F(x) = P(X < x); tail functionals
such as E[X^2; |X| > t] exclude atoms located exactly at the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .gaussian import (
    SQRT_2_OVER_PI,
    norm_cdf,
    norm_central_prob,
    norm_pdf,
    norm_sf,
    normal_abs_moment,
    normal_tail_abs_moment,
    normal_tail_second_moment,
    upper_x_sf_integral,
    x2_antiderivative,
)

_SQRT3 = math.sqrt(3.0)


class FamilyConfigError(ValueError):
    """Unknown family kind or invalid family parameters."""


class MomentError(ValueError):
    """Requested moment does not exist or the order is out of range."""


# ---------------------------------------------------------------------------
# Standardized laws (zero mean, unit variance)
# ---------------------------------------------------------------------------


class Law:
    """Interface for a standardized (zero-mean, unit-variance) summand law."""

    name: str = ""
    is_discrete: bool = False
    # (lo, hi) outside of which the law carries no mass; +-inf when unbounded
    support: tuple[float, float] = (-math.inf, math.inf)
    # (points, masses) for discrete laws, None otherwise
    atoms: Optional[tuple[np.ndarray, np.ndarray]] = None

    def cdf(self, z):
        """P(Z < z), left-continuous at atoms."""
        raise NotImplementedError

    def pdf(self, z):
        """Density, continuous laws only."""
        raise NotImplementedError

    def abs_moment(self, order: float) -> float:
        """E|Z|^order, closed form."""
        raise NotImplementedError

    def tail_second_moment(self, t):
        """E[Z^2; |Z| > t] for t >= 0 (strict inequality at atoms)."""
        raise NotImplementedError

    def tail_abs_moment(self, t, order: float):
        """E[|Z|^order; |Z| > t], or None when no closed form is known."""
        return None

    def central_prob(self, t):
        """P(|Z| <= t); the complement P(|Z| > t) uses strict inequality."""
        raise NotImplementedError

    def rotar_unit_tail(self, t):
        """integral_{|z|>t} |z| * |F(z) - Phi(z)| dz, closed form.

        Returns None when no closed form is available (then the adaptive
        quadrature engine is the only route).
        """
        return None

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def sample_sum(self, rng: np.random.Generator, k: int) -> float:
        """One draw of Z_1 + ... + Z_k (exact distribution)."""
        return float(np.sum(self.sample(rng, size=k)))

    def batch_sums(self, rng: np.random.Generator, ks: np.ndarray):
        """Vectorized draws of S_k for an array of counts, or None.

        Only laws whose k-fold sum has an exactly samplable distribution
        provide this; it is the Monte Carlo fast path.
        """
        return None


class RademacherLaw(Law):
    """P(Z = +1) = P(Z = -1) = 1/2."""

    name = "rademacher"
    is_discrete = True
    support = (-1.0, 1.0)

    def __init__(self):
        self.atoms = (np.array([-1.0, 1.0]), np.array([0.5, 0.5]))

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z <= -1.0, 0.0, np.where(z <= 1.0, 0.5, 1.0))

    def abs_moment(self, order):
        return 1.0

    def tail_second_moment(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 1.0, 1.0, 0.0)

    def tail_abs_moment(self, t, order):
        t = np.asarray(t, dtype=float)
        return np.where(t < 1.0, 1.0, 0.0)

    def central_prob(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 1.0, 1.0, 0.0)

    def rotar_unit_tail(self, t):
        # |F - Phi| equals Phi(z) - 1/2 on 0 < z <= 1 and 1 - Phi(z) beyond;
        # both halves contribute equally by symmetry.
        t = np.asarray(t, dtype=float)
        t = np.maximum(t, 0.0)
        inner_hi = _x_phi_minus_half(np.minimum(t, 1.0))
        inner = _x_phi_minus_half(1.0) - inner_hi
        outer = upper_x_sf_integral(np.maximum(t, 1.0))
        return 2.0 * (np.where(t < 1.0, inner, 0.0) + outer)

    def sample(self, rng, size=None):
        return rng.integers(0, 2, size=size) * 2.0 - 1.0

    def sample_sum(self, rng, k):
        return 2.0 * float(rng.binomial(k, 0.5)) - k

    def batch_sums(self, rng, ks):
        return 2.0 * rng.binomial(ks, 0.5) - ks


def _x_phi_minus_half(z):
    """Antiderivative of z * (Phi(z) - 1/2)."""
    z = np.asarray(z, dtype=float)
    return 0.5 * z * z * (norm_cdf(z) - 0.5) - 0.5 * x2_antiderivative(z)


class UniformLaw(Law):
    """Uniform on [-sqrt(3), sqrt(3)] (unit variance)."""

    name = "uniform"
    support = (-_SQRT3, _SQRT3)

    def __init__(self):
        self._sign_root = None

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        return np.clip((z + _SQRT3) / (2.0 * _SQRT3), 0.0, 1.0)

    def pdf(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(np.abs(z) <= _SQRT3, 1.0 / (2.0 * _SQRT3), 0.0)

    def abs_moment(self, order):
        return 3.0 ** (0.5 * order) / (order + 1.0)

    def tail_second_moment(self, t):
        t = np.asarray(t, dtype=float)
        t = np.clip(t, 0.0, _SQRT3)
        return 1.0 - t**3 / (3.0 * _SQRT3)

    def tail_abs_moment(self, t, order):
        t = np.asarray(t, dtype=float)
        t = np.clip(t, 0.0, _SQRT3)
        return (3.0 ** (0.5 * (order + 1.0)) - t ** (order + 1.0)) / (
            (order + 1.0) * _SQRT3
        )

    def central_prob(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip(t / _SQRT3, 0.0, 1.0)

    def _diff(self, z):
        return self.cdf(z) - norm_cdf(z)

    @property
    def sign_root(self) -> float:
        """Unique z in (0, sqrt(3)) where F - Phi changes sign."""
        if self._sign_root is None:
            self._sign_root = brentq(self._diff, 1e-8, _SQRT3 - 1e-12, xtol=1e-15)
        return self._sign_root

    def _antideriv(self, z):
        # integral of z * (F(z) - Phi(z)) dz on [0, sqrt(3)]
        z = np.asarray(z, dtype=float)
        poly = 0.25 * z * z + z**3 / (6.0 * _SQRT3)
        gauss = 0.5 * z * z * norm_cdf(z) - 0.5 * x2_antiderivative(z)
        return poly - gauss

    def rotar_unit_tail(self, t):
        t = np.asarray(t, dtype=float)
        t = np.maximum(t, 0.0)
        zs = self.sign_root
        # F - Phi is negative on (0, z*), positive on (z*, sqrt(3)), and equals
        # 1 - Phi beyond the support edge; symmetric in z -> -z.
        h = self._antideriv
        neg = np.where(t < zs, -(h(zs) - h(np.minimum(t, zs))), 0.0)
        pos = np.where(t < _SQRT3, h(_SQRT3) - h(np.clip(t, zs, _SQRT3)), 0.0)
        outer = upper_x_sf_integral(np.maximum(t, _SQRT3))
        return 2.0 * (neg + pos + outer)

    def sample(self, rng, size=None):
        return rng.uniform(-_SQRT3, _SQRT3, size=size)


class NormalLaw(Law):
    """Standard normal; coincides with its own comparator."""

    name = "normal"

    def cdf(self, z):
        return norm_cdf(z)

    def pdf(self, z):
        return norm_pdf(z)

    def abs_moment(self, order):
        return normal_abs_moment(order)

    def tail_second_moment(self, t):
        return normal_tail_second_moment(t)

    def tail_abs_moment(self, t, order):
        return normal_tail_abs_moment(t, order)

    def central_prob(self, t):
        return norm_central_prob(t)

    def rotar_unit_tail(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def sample(self, rng, size=None):
        return rng.standard_normal(size)

    def sample_sum(self, rng, k):
        return float(rng.standard_normal()) * math.sqrt(k)

    def batch_sums(self, rng, ks):
        return rng.standard_normal(len(ks)) * np.sqrt(ks)


class CenteredExponentialLaw(Law):
    """Exp(1) shifted by -1: support [-1, inf), zero mean, unit variance."""

    name = "expcentered"
    support = (-1.0, math.inf)

    def __init__(self):
        self._roots = None

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= -1.0, -np.expm1(-(z + 1.0)), 0.0)

    def pdf(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= -1.0, np.exp(-(z + 1.0)), 0.0)

    @staticmethod
    def _lower_piece(t, order):
        # integral_t^1 u^order e^(u-1) du via the exponential series
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        fact = 1.0
        for m in range(0, 40):
            if m > 0:
                fact *= m
            p = order + m + 1.0
            total = total + (1.0 - t**p) / (fact * p)
        return total / math.e

    def abs_moment(self, order):
        return float(self._lower_piece(0.0, order) + math.gamma(order + 1.0) / math.e)

    def tail_second_moment(self, t):
        t = np.asarray(t, dtype=float)
        right = np.exp(-(t + 1.0)) * (t * t + 2.0 * t + 2.0)
        tl = np.minimum(t, 1.0)
        left = 1.0 - np.exp(tl - 1.0) * (tl * tl - 2.0 * tl + 2.0)
        return right + np.where(t < 1.0, left, 0.0)

    def tail_abs_moment(self, t, order):
        from scipy.special import gammaincc

        t = np.asarray(t, dtype=float)
        right = (
            math.gamma(order + 1.0) / math.e * gammaincc(order + 1.0, np.maximum(t, 0.0))
        )
        left = self._lower_piece(np.clip(t, 0.0, 1.0), order)
        return right + np.where(t < 1.0, left, 0.0)

    def central_prob(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-np.maximum(0.0, 1.0 - t)) - np.exp(-(1.0 + t))

    def _diff(self, z):
        return float(self.cdf(z) - norm_cdf(z))

    @property
    def sign_roots(self) -> tuple[float, float]:
        """Roots of F - Phi: one in (-1, 0), one past the mode crossing."""
        if self._roots is None:
            r1 = brentq(self._diff, -1.0 + 1e-13, 0.0, xtol=1e-15)
            r2 = brentq(self._diff, 1.0, 3.0, xtol=1e-15)
            self._roots = (r1, r2)
        return self._roots

    @staticmethod
    def _antideriv(z):
        # integral of z * (F(z) - Phi(z)) dz for z >= -1
        z = np.asarray(z, dtype=float)
        expo = 0.5 * z * z + (z + 1.0) * np.exp(-(z + 1.0))
        gauss = 0.5 * z * z * norm_cdf(z) - 0.5 * x2_antiderivative(z)
        return expo - gauss

    def rotar_unit_tail(self, t):
        t = np.asarray(t, dtype=float)
        t = np.maximum(t, 0.0)
        r1, r2 = self.sign_roots
        G = self._antideriv
        # Left side, z < -t.  Below -1: F = 0, so |z||F-Phi| = -z Phi(z) and
        # the whole tail is integral_{max(t,1)}^{inf} u Phi(-u) du.
        left_far = upper_x_sf_integral(np.maximum(t, 1.0))
        # Between -1 and -t (only when t < 1): h < 0 on (-1, r1), h > 0 after.
        a = -np.minimum(t, 1.0)  # upper end of |z|>t on the negative axis
        lo = -1.0
        # piece (-1, min(a, r1)): h < 0, z < 0 so |z||h| = z h -> +Delta G
        p1_hi = np.minimum(a, r1)
        left_neg = np.where(p1_hi > lo, G(p1_hi) - G(lo), 0.0)
        # piece (r1, min(a, 0)): h > 0, z < 0 -> -Delta G
        p2_hi = np.minimum(a, 0.0)
        left_pos = np.where(p2_hi > r1, -(G(p2_hi) - G(r1)), 0.0)
        left_mid = np.where(t < 1.0, left_neg + left_pos, 0.0)
        # Right side, z > t: h > 0 on (0, r2), h < 0 beyond.
        b = np.maximum(t, 0.0)
        q1_lo = np.minimum(b, r2)
        right_pos = np.where(r2 > b, G(r2) - G(q1_lo), 0.0)
        # beyond r2: |h| = e^{-(z+1)} - Phi_c(z); both terms closed form
        far_lo = np.maximum(b, r2)
        right_neg = (far_lo + 1.0) * np.exp(-(far_lo + 1.0)) - upper_x_sf_integral(
            far_lo
        )
        return left_far + left_mid + right_pos + right_neg

    def sample(self, rng, size=None):
        return rng.standard_exponential(size) - 1.0

    def sample_sum(self, rng, k):
        return float(rng.standard_gamma(k)) - k

    def batch_sums(self, rng, ks):
        return rng.standard_gamma(ks) - ks


# ---------------------------------------------------------------------------
# Standard deviation profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantProfile:
    """sigma_j = sigma for every j (i.i.d. scaling)."""

    sigma: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.sigma < math.inf):
            raise FamilyConfigError(f"sigma must be positive and finite: {self.sigma}")

    @property
    def is_constant(self) -> bool:
        return True

    def sigma_at(self, j):
        return np.full_like(np.asarray(j, dtype=float), self.sigma)

    def variance_at(self, j):
        return np.full_like(np.asarray(j, dtype=float), self.sigma**2)

    def log_variance_at(self, j):
        return np.full_like(np.asarray(j, dtype=float), 2.0 * math.log(self.sigma))

    def b_squared(self, n):
        return np.asarray(n, dtype=float) * self.sigma**2

    def log_b_squared(self, n):
        return np.log(np.asarray(n, dtype=float)) + 2.0 * math.log(self.sigma)

    def log_sum_sigma_pow(self, n, power):
        return np.log(np.asarray(n, dtype=float)) + power * math.log(self.sigma)

    def max_sigma(self, n):
        return np.full_like(np.asarray(n, dtype=float), self.sigma)

    def log_max_sigma(self, n):
        return np.full_like(np.asarray(n, dtype=float), math.log(self.sigma))


@dataclass(frozen=True)
class GeometricProfile:
    """sigma_j^2 = ratio^(j-1); ratio > 1 gives exploding variances."""

    ratio: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.ratio < math.inf) or self.ratio == 1.0:
            raise FamilyConfigError(
                f"variance ratio must be positive, finite and != 1: {self.ratio}"
            )

    @property
    def is_constant(self) -> bool:
        return False

    def sigma_at(self, j):
        j = np.asarray(j, dtype=float)
        with np.errstate(over="ignore"):
            return np.asarray(self.ratio, dtype=float) ** (0.5 * (j - 1.0))

    def variance_at(self, j):
        j = np.asarray(j, dtype=float)
        with np.errstate(over="ignore"):
            return np.asarray(self.ratio, dtype=float) ** (j - 1.0)

    def log_variance_at(self, j):
        j = np.asarray(j, dtype=float)
        return (j - 1.0) * math.log(self.ratio)

    def b_squared(self, n):
        n = np.asarray(n, dtype=float)
        with np.errstate(over="ignore"):
            return (np.asarray(self.ratio, dtype=float) ** n - 1.0) / (self.ratio - 1.0)

    def log_b_squared(self, n):
        return self.log_sum_sigma_pow(n, 2.0)

    def log_sum_sigma_pow(self, n, power):
        # log of sum_{j<=n} q^(j-1) with q = ratio^(power/2)
        n = np.asarray(n, dtype=float)
        logq = 0.5 * power * math.log(self.ratio)
        if logq > 0:
            # (q^n - 1)/(q - 1) = q^(n-1) * (1 - q^-n) / (1 - 1/q)
            return (
                n * logq
                + np.log1p(-np.exp(-n * logq))
                - logq
                - math.log1p(-math.exp(-logq))
            )
        return np.log1p(-np.exp(n * logq)) - math.log1p(-math.exp(logq))

    def max_sigma(self, n):
        n = np.asarray(n, dtype=float)
        return self.sigma_at(n) if self.ratio > 1.0 else self.sigma_at(np.ones_like(n))

    def log_max_sigma(self, n):
        n = np.asarray(n, dtype=float)
        if self.ratio > 1.0:
            return 0.5 * (n - 1.0) * math.log(self.ratio)
        return np.zeros_like(n)


# ---------------------------------------------------------------------------
# Partial variance bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialVariance:
    """Cumulative variance of the first n summands.

    b_squared may overflow to +inf for exploding-variance profiles at very
    large n; log_b_squared stays finite and is what downstream numerics use.
    """

    n: int
    b_squared: float
    b: float
    log_b_squared: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1: {self.n}")
        if not self.b_squared > 0.0:
            raise ValueError(f"cumulative variance must be positive: {self.b_squared}")


# ---------------------------------------------------------------------------
# Families and the normal comparator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummandFamily:
    """An indexed sequence of independent zero-mean summands sigma_j * Z."""

    kind: str
    law: Law
    profile: object
    params: dict = field(default_factory=dict)

    @property
    def is_iid(self) -> bool:
        return self.profile.is_constant

    def sigma(self, j):
        _check_index(j)
        return self.profile.sigma_at(j)

    def variance(self, j):
        _check_index(j)
        return self.profile.variance_at(j)

    def cdf(self, j, x):
        """F_j(x) = P(sigma_j Z < x)."""
        _check_index(j)
        s = self.profile.sigma_at(j)
        return self.law.cdf(np.asarray(x, dtype=float) / s)

    def abs_moment(self, j, order):
        """E|X_j|^order, exact for every built-in law."""
        _check_index(j)
        if order < 1.0:
            raise MomentError(f"moment order must be >= 1: {order}")
        s = float(self.profile.sigma_at(j))
        return s**order * self.law.abs_moment(order)

    def sample(self, j, rng: np.random.Generator):
        """One draw of X_j from the caller-owned stream."""
        _check_index(j)
        return float(self.profile.sigma_at(j)) * float(self.law.sample(rng))

    def partial_variance(self, n: int) -> PartialVariance:
        if n < 1:
            raise ValueError(f"n must be >= 1: {n}")
        b2 = float(self.profile.b_squared(n))
        logb2 = float(self.profile.log_b_squared(n))
        return PartialVariance(
            n=n, b_squared=b2, b=math.sqrt(b2) if b2 < math.inf else math.inf,
            log_b_squared=logb2,
        )

    def comparator(self) -> "NormalComparator":
        return NormalComparator(profile=self.profile)

    # -- Monte Carlo support -------------------------------------------------

    def batch_normalized_sums(self, rng: np.random.Generator, ks: np.ndarray):
        """Vectorized draws of S_k / B_k for an array of realized indices.

        Returns None when the family has no exact vectorized path; callers
        then fall back to per-trial substreams.
        """
        if self.profile.is_constant:
            sums = self.law.batch_sums(rng, ks)
            if sums is None:
                return None
            return sums / np.sqrt(ks)
        if isinstance(self.law, NormalLaw):
            # weighted sum of independent normals is normal with variance B_k^2
            return rng.standard_normal(len(ks))
        return None

    def normalized_sum_draw(self, k: int, rng: np.random.Generator) -> float:
        """One draw of S_k / B_k from the caller's stream (generic path)."""
        if self.profile.is_constant:
            return self.law.sample_sum(rng, k) / math.sqrt(k)
        logb = 0.5 * float(self.profile.log_b_squared(k))
        j = np.arange(1, k + 1)
        logw = 0.5 * self.profile.log_variance_at(j) - logb
        keep = logw > -42.0  # weights below ~5e-19 cannot move a float64 sum
        w = np.exp(logw[keep])
        draws = self.law.sample(rng, size=int(keep.sum()))
        return float(np.dot(w, draws))


@dataclass(frozen=True)
class NormalComparator:
    """The matched sequence X*_j ~ N(0, sigma_j^2) with the family's sigmas."""

    profile: object

    @classmethod
    def for_family(cls, family: SummandFamily) -> "NormalComparator":
        return cls(profile=family.profile)

    def sigma(self, j):
        _check_index(j)
        return self.profile.sigma_at(j)

    def cdf(self, j, x):
        _check_index(j)
        s = self.profile.sigma_at(j)
        return norm_cdf(np.asarray(x, dtype=float) / s)

    def abs_first_moment(self, j):
        """E|X*_j| = sigma_j * sqrt(2/pi)."""
        _check_index(j)
        return self.profile.sigma_at(j) * SQRT_2_OVER_PI


def _check_index(j):
    if np.any(np.asarray(j) < 1):
        raise ValueError("summand index j must be >= 1")


# ---------------------------------------------------------------------------
# Factory and CLI grammar
# ---------------------------------------------------------------------------

_LAWS = {
    "rademacher": RademacherLaw,
    "uniform": UniformLaw,
    "normal": NormalLaw,
    "expcentered": CenteredExponentialLaw,
}


def make_family(kind: str, **params) -> SummandFamily:
    """Construct a built-in family.

    Kinds: rademacher | uniform | normal[, sigma=s] | expcentered
           | geomnormal[, ratio=r]   (normal summands, sigma_j^2 = r^(j-1))
           | twopoint[, growth=r]    (two-point +-sigma_j, sigma_j^2 = r^(j-1))
    """
    kind = kind.lower()
    if kind in ("rademacher", "uniform", "expcentered"):
        _reject_extra(kind, params, ())
        return SummandFamily(kind=kind, law=_LAWS[kind](), profile=ConstantProfile())
    if kind == "normal":
        _reject_extra(kind, params, ("sigma",))
        sigma = float(params.get("sigma", 1.0))
        return SummandFamily(
            kind=kind, law=NormalLaw(), profile=ConstantProfile(sigma=sigma),
            params={"sigma": sigma},
        )
    if kind == "geomnormal":
        _reject_extra(kind, params, ("ratio",))
        ratio = float(params.get("ratio", 2.0))
        return SummandFamily(
            kind=kind, law=NormalLaw(), profile=GeometricProfile(ratio=ratio),
            params={"ratio": ratio},
        )
    if kind == "twopoint":
        _reject_extra(kind, params, ("growth",))
        growth = float(params.get("growth", 2.0))
        return SummandFamily(
            kind=kind, law=RademacherLaw(), profile=GeometricProfile(ratio=growth),
            params={"growth": growth},
        )
    raise FamilyConfigError(f"unknown family kind: {kind!r}")


def _reject_extra(kind, params, allowed):
    extra = set(params) - set(allowed)
    if extra:
        raise FamilyConfigError(f"family {kind!r} got unknown parameters: {sorted(extra)}")


def parse_family(spec: str) -> SummandFamily:
    """Parse the flag grammar '[family=]<kind>[,<key>=<value>...]'."""
    spec = spec.strip()
    if spec.startswith("family="):
        spec = spec[len("family="):]
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if not parts:
        raise FamilyConfigError("empty family spec")
    kind = parts[0]
    params = {}
    for item in parts[1:]:
        if "=" not in item:
            raise FamilyConfigError(f"malformed family parameter {item!r} in {spec!r}")
        key, _, value = item.partition("=")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise FamilyConfigError(f"non-numeric family parameter {item!r}") from exc
    return make_family(kind, **params)


def comparator_family(family: SummandFamily) -> SummandFamily:
    """The all-normal twin of a family: same sigmas, normal summands."""
    if isinstance(family.law, NormalLaw):
        return family
    return SummandFamily(
        kind=f"{family.kind}-normal-twin", law=NormalLaw(), profile=family.profile,
        params=dict(family.params),
    )


def family_spec_string(family: SummandFamily) -> str:
    """Inverse of parse_family for --print-config round trips."""
    if not family.params:
        return family.kind
    items = ",".join(f"{k}={v:g}" for k, v in sorted(family.params.items()))
    return f"{family.kind},{items}"


BUILTIN_FAMILY_KINDS = (
    "rademacher",
    "uniform",
    "normal",
    "geomnormal",
    "twopoint",
    "expcentered",
)
