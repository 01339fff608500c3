"""Laplace-Beltrami eigenstructure of a sphere and the smoothing operator.

Tangential fields on the sphere of radius ``R`` are stored by their
coefficients in the orthonormal vector basis ``{grad Y_lm, curl Y_lm}``
(``l >= 1``). Row ``i`` of a coefficient array holds degree/order ``(l, m)``
with rows ordered by ``l`` then ``m``; column 0 is the GRAD family and column
1 the CURL family. The combined flat index ``2*i + family`` therefore
enumerates vector modes by nondecreasing eigenvalue with ties broken
lexicographically by ``(l, m, family)``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegreeOutOfRange,
    SpectrumMismatch,
    SpectrumTooSmall,
    ZeroModePresent,
)


class Family(enum.IntEnum):
    GRAD = 0
    CURL = 1


@dataclass(frozen=True)
class SurfaceSpectrum:
    """Scalar Laplace-Beltrami spectrum ``mu(l) = l(l+1)/R^2`` up to ``l_max``."""

    radius: float = 1.0
    l_max: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if int(self.l_max) != self.l_max or self.l_max < 1:
            raise ValueError(f"l_max must be an integer >= 1, got {self.l_max}")

    def mu(self, l):
        l = np.asarray(l, dtype=float)
        return l * (l + 1.0) / self.radius**2

    @property
    def degrees(self):
        return np.arange(1, self.l_max + 1)

    @property
    def n_rows(self):
        """Number of ``(l, m)`` pairs, i.e. modes per family."""
        return self.l_max * (self.l_max + 2)

    @property
    def row_degrees(self):
        return np.repeat(self.degrees, 2 * self.degrees + 1)

    @property
    def row_mu(self):
        return self.mu(self.row_degrees)

    def block_starts(self):
        """Row index where each degree's block of ``2l+1`` orders begins."""
        l = self.degrees
        return (l - 1) * (l + 1)

    def row_of(self, l, m):
        if not 1 <= l <= self.l_max or abs(m) > l:
            raise DegreeOutOfRange(f"mode (l={l}, m={m}) outside spectrum")
        return (l - 1) * (l + 1) + (m + l)

    def flat_index(self, mode):
        return 2 * self.row_of(mode.l, mode.m) + int(mode.family)

    def modes(self):
        for l in range(1, self.l_max + 1):
            for m in range(-l, l + 1):
                for fam in Family:
                    yield ModeIndex(l, m, fam)


@dataclass(frozen=True, order=True)
class ModeIndex:
    l: int
    m: int
    family: Family

    def __post_init__(self):
        if self.l < 1:
            raise ZeroModePresent(f"degree {self.l} carries no vector modes")
        if abs(self.m) > self.l:
            raise ValueError(f"order m={self.m} outside [-l, l] for l={self.l}")


class TangentialField:
    """Finite expansion of a tangential field in the vector eigenbasis."""

    def __init__(self, spectrum, coeffs=None):
        self.spectrum = spectrum
        if coeffs is None:
            coeffs = np.zeros((spectrum.n_rows, 2), dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (spectrum.n_rows, 2):
            raise ValueError(
                f"expected coefficients of shape {(spectrum.n_rows, 2)}, "
                f"got {coeffs.shape}"
            )
        self.coeffs = coeffs

    @classmethod
    def from_arrays(cls, spectrum, grad, curl):
        return cls(spectrum, np.column_stack([grad, curl]))

    @classmethod
    def from_modes(cls, spectrum, mapping):
        """Build a field from a ``{(l, m, family): value}`` or ``{ModeIndex: value}`` map."""
        field = cls(spectrum)
        for key, value in mapping.items():
            mode = key if isinstance(key, ModeIndex) else ModeIndex(*key)
            if mode.l > spectrum.l_max:
                raise DegreeOutOfRange(f"degree {mode.l} exceeds l_max")
            field.coeffs[spectrum.row_of(mode.l, mode.m), int(mode.family)] = value
        return field

    @classmethod
    def random(cls, spectrum, rng):
        shape = (spectrum.n_rows, 2)
        return cls(spectrum, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    @property
    def grad(self):
        return self.coeffs[:, 0]

    @property
    def curl(self):
        return self.coeffs[:, 1]

    def __getitem__(self, mode):
        if not isinstance(mode, ModeIndex):
            mode = ModeIndex(*mode)
        return self.coeffs[self.spectrum.row_of(mode.l, mode.m), int(mode.family)]

    def copy(self):
        return TangentialField(self.spectrum, self.coeffs.copy())

    def __repr__(self):
        return f"TangentialField(l_max={self.spectrum.l_max}, R={self.spectrum.radius})"


@dataclass(frozen=True)
class SobolevSpace:
    """Spectral Sobolev space tag; build with the class-level constructors."""

    tag: str
    s: float = 0.0

    @classmethod
    def Ht(cls, s):
        return cls("Ht", float(s))

    @classmethod
    def HdivZero(cls, s):
        return cls("HdivZero", float(s))

    @classmethod
    def HdivMinusHalf(cls):
        return cls("HdivMinusHalf", -0.5)

    @classmethod
    def HcurlMinusHalf(cls):
        return cls("HcurlMinusHalf", -0.5)


def lb_eigenvalue(spec, l):
    """Eigenvalue ``l(l+1)/R^2`` of the (nonnegative) Laplace-Beltrami operator."""
    if int(l) != l or not 0 <= l <= spec.l_max:
        raise DegreeOutOfRange(f"degree {l} outside [0, {spec.l_max}]")
    return l * (l + 1) / spec.radius**2


def smoothing_factors(delta, spec):
    """Per-row multipliers ``mu^(-delta)`` of the smoothing operator."""
    if delta < 0:
        raise ValueError(f"smoothing parameter must be >= 0, got {delta}")
    return spec.row_mu ** (-float(delta))


def apply_smoothing(delta, xi):
    """Apply ``S_delta``: scale CURL coefficients by ``mu^-delta``, drop GRAD.

    ``S_0`` is the orthogonal projection onto the divergence-free family, and
    the family ``{S_delta}`` is a semigroup in ``delta``.
    """
    out = np.zeros_like(xi.coeffs)
    out[:, 1] = xi.coeffs[:, 1] * smoothing_factors(delta, xi.spectrum)
    return TangentialField(xi.spectrum, out)


def truncate(xi, M):
    """Rank truncation: keep CURL rows with index < ``M``, zero everything else."""
    if not 0 <= M <= xi.spectrum.n_rows:
        raise ValueError(f"truncation rank {M} outside [0, {xi.spectrum.n_rows}]")
    out = np.zeros_like(xi.coeffs)
    out[:M, 1] = xi.coeffs[:M, 1]
    return TangentialField(xi.spectrum, out)


def sobolev_norm(xi, space):
    """Spectral norm of ``xi`` in one of the trace spaces.

    ``Ht(s)`` and ``HdivZero(s)`` use the weight ``mu^(s+1)`` on both families
    (``HdivZero`` additionally requires vanishing GRAD coefficients);
    ``HdivMinusHalf`` weights ``mu^(1/2) (mu |g|^2 + |c|^2)`` and
    ``HcurlMinusHalf`` weights ``mu^(1/2) (|g|^2 + mu |c|^2)``.
    """
    mu = xi.spectrum.row_mu
    g2 = np.abs(xi.grad) ** 2
    c2 = np.abs(xi.curl) ** 2
    if space.tag in ("Ht", "HdivZero"):
        if space.tag == "HdivZero" and np.any(xi.grad != 0):
            raise ValueError("field is not divergence free (GRAD coefficients present)")
        total = np.sum(mu ** (space.s + 1.0) * (g2 + c2))
    elif space.tag == "HdivMinusHalf":
        total = np.sum(np.sqrt(mu) * (mu * g2 + c2))
    elif space.tag == "HcurlMinusHalf":
        total = np.sum(np.sqrt(mu) * (g2 + mu * c2))
    else:
        raise ValueError(f"unknown space tag {space.tag!r}")
    return math.sqrt(float(total))


def duality_pairing(xi, eta):
    """``<xi, eta>`` with conjugation in the second slot (orthonormal basis)."""
    if xi.spectrum != eta.spectrum:
        raise SpectrumMismatch("fields live on different spectra")
    return complex(np.sum(xi.coeffs * np.conj(eta.coeffs)))


def smoothing_distance_norm(delta, spec):
    """Operator norm of ``S_delta - S_0`` from ``H^1(div0)`` into ``H(div0)``.

    The per-degree factor ``|1 - mu^-delta| / sqrt(mu)`` is non-increasing once
    ``mu > e^2``, so the maximum over all degrees is attained at or before the
    first degree ``l*`` with ``mu(l*) > e^2``.
    """
    if delta < 0:
        raise ValueError(f"smoothing parameter must be >= 0, got {delta}")
    if delta == 0:
        return 0.0
    mu = spec.mu(spec.degrees)
    beyond = np.nonzero(mu > math.e**2)[0]
    if beyond.size == 0:
        raise SpectrumTooSmall(
            f"mu(l_max)={mu[-1]:.4g} does not exceed e^2; increase l_max"
        )
    head = mu[: beyond[0] + 1]
    return float(np.max(np.abs(-np.expm1(-delta * np.log(head))) / np.sqrt(head)))


def weyl_partial_sums(beta, spec):
    """Partial sums of ``mu^-beta`` over the flat vector-mode enumeration."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    terms = np.repeat(spec.row_mu ** (-float(beta)), 2)
    return np.cumsum(terms)


def series_verdict(partial_sums, block_sizes, rtol=1e-3):
    """Decide whether a series of nonnegative terms has visibly converged.

    The last block (one degree's worth of terms) must add less than ``rtol``
    relative to the running total. Per-term increments are too optimistic
    because a degree contributes ``O(l)`` equal terms.
    """
    partial_sums = np.asarray(partial_sums, dtype=float)
    last = int(block_sizes[-1])
    total = partial_sums[-1]
    before = partial_sums[-last - 1] if last < partial_sums.size else 0.0
    increment = (total - before) / total if total > 0 else 0.0
    return bool(increment < rtol), float(increment)
