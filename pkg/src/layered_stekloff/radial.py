"""Radial Maxwell solutions inside a radially layered ball.

For a concentric medium every field separates into TE modes (tangential
electric trace along ``curl_S Y``) and TM modes (trace along ``grad_S Y``).
Within a shell of constant permittivity ``eps`` both radial factors solve the
spherical Bessel equation with wavenumber ``kappa = k sqrt(eps)``:

* TE: ``E = f(r) curl_{S^2} Y``. Continuity of tangential E and H across an
  interface means ``f`` and ``(r f)'`` are continuous.
* TM: ``H = g(r) curl_{S^2} Y``. Continuity of tangential H and E means ``g``
  and ``(r g)' / eps`` are continuous.

The state ``(f, (r f)')`` (or ``(g, (r g)'/eps)``) is carried outward with
2x2 transfer matrices built on ``{j_l, y_l}``; the core uses ``j_l`` alone.
"""

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTrace, InteriorResonance, InvalidMedium
from .specfun import BesselKind, riccati_seq

RESONANCE_RTOL = 1e-12
ASSUMPTION_RTOL = 1e-7
_TINY = 1e-300


class Polarization(enum.Enum):
    TE = "TE"
    TM = "TM"


@dataclass(frozen=True)
class LayeredMedium:
    """Piecewise-constant permittivity on concentric shells of the ball ``|x| < R``.

    Shell ``j`` occupies ``(radii[j-1], radii[j])`` with ``radii[-1] = R`` and
    an implicit inner radius 0. Outside ``R`` the medium is vacuum.
    """

    radii: tuple
    eps: tuple
    eps_min: float = 1e-6

    def __post_init__(self):
        radii = tuple(float(r) for r in np.atleast_1d(self.radii))
        eps = tuple(complex(e) for e in np.atleast_1d(self.eps))
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "eps", eps)
        if len(radii) == 0 or len(radii) != len(eps):
            raise InvalidMedium(
                f"need one permittivity per shell, got {len(radii)} radii and {len(eps)} values"
            )
        if not all(math.isfinite(r) for r in radii) or radii[0] <= 0:
            raise InvalidMedium(f"radii must be finite and positive: {radii}")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise InvalidMedium(f"radii must be strictly increasing: {radii}")
        for e in eps:
            if not (cmath.isfinite(e) and e.real >= self.eps_min and e.imag >= 0):
                raise InvalidMedium(
                    f"permittivity {e} violates Re(eps) >= {self.eps_min}, Im(eps) >= 0"
                )

    @classmethod
    def homogeneous(cls, eps=1.0, radius=1.0):
        return cls((radius,), (eps,))

    @property
    def R(self):
        return self.radii[-1]

    @property
    def n_shells(self):
        return len(self.radii)

    @property
    def is_real(self):
        return all(e.imag == 0 for e in self.eps)

    @property
    def is_absorbing(self):
        return any(e.imag > 0 for e in self.eps)

    @property
    def inner_radii(self):
        return (0.0,) + self.radii[:-1]

    def with_eps(self, shell, value):
        eps = list(self.eps)
        eps[shell] = complex(value)
        return LayeredMedium(self.radii, tuple(eps), self.eps_min)

    def split(self, shell, radius):
        """Insert an interface at ``radius`` inside ``shell`` without changing eps."""
        lo, hi = self.inner_radii[shell], self.radii[shell]
        if not lo < radius < hi:
            raise InvalidMedium(f"radius {radius} is not inside shell {shell}")
        radii = self.radii[:shell] + (radius,) + self.radii[shell:]
        eps = self.eps[: shell + 1] + self.eps[shell:]
        return LayeredMedium(radii, eps, self.eps_min)

    def eps_at(self, r):
        """Permittivity at radius ``r`` (vacuum beyond ``R``)."""
        r = np.asarray(r, dtype=float)
        idx = np.searchsorted(np.asarray(self.radii), r, side="left")
        table = np.append(np.asarray(self.eps), 1.0 + 0j)
        return table[idx]


@dataclass(frozen=True)
class BoundaryTrace:
    """Radial data of the regular solution at ``r = R``.

    For TE ``value_at_R = f(R)`` and ``riccati_at_R = (r f)'(R)``; for TM
    ``value_at_R = g(R)`` and ``riccati_at_R = (r g)'(R) / eps_outer``. Both
    entries are the quantities that stay continuous across interfaces.
    """

    value_at_R: complex
    riccati_at_R: complex
    l: int
    polarization: Polarization


@dataclass(frozen=True)
class AssumptionReport:
    k: float
    l_max: int
    tm_degrees: tuple = field(default_factory=tuple)
    te_degrees: tuple = field(default_factory=tuple)
    residuals_tm: tuple = field(default_factory=tuple)
    residuals_te: tuple = field(default_factory=tuple)

    @property
    def degrees(self):
        return tuple(sorted(set(self.tm_degrees) | set(self.te_degrees)))

    @property
    def all_clear(self):
        return not self.degrees


def wavenumbers(med, k):
    if not k > 0:
        raise InvalidMedium(f"wavenumber must be positive, got {k}")
    return [k * cmath.sqrt(e) for e in med.eps]


def _basis(kappa, r, lmax, eta):
    """Rows ``[[j, y], [(xj)'/eta, (xy)'/eta]]`` per degree at ``x = kappa r``."""
    x = kappa * r
    j, dj = riccati_seq(BesselKind.J, lmax, x)
    y, dy = riccati_seq(BesselKind.Y, lmax, x)
    P = np.empty((lmax + 1, 2, 2), dtype=complex)
    P[:, 0, 0] = j
    P[:, 0, 1] = y
    P[:, 1, 0] = dj / eta
    P[:, 1, 1] = dy / eta
    return P, 1.0 / (x * eta)


def _eta(med, shell, pol):
    return 1.0 if pol is Polarization.TE else med.eps[shell]


def transfer_matrices(med, k, l_max, polarization=Polarization.TE):
    """Interface transfer matrices and their determinant checks.

    Returns a list with one dict per interface containing ``radius``,
    ``matrix`` (shape ``(l_max+1, 2, 2)``, mapping shell coefficients inward to
    outward), ``det`` (from the computed Bessel values) and ``det_closed``
    (the Wronskian value ``kappa_out eta_out / (kappa_in eta_in)``).
    """
    pol = Polarization(polarization)
    kap = wavenumbers(med, k)
    out = []
    for i, r in enumerate(med.radii[:-1]):
        Pin, det_in = _basis(kap[i], r, l_max, _eta(med, i, pol))
        Pout, det_out = _basis(kap[i + 1], r, l_max, _eta(med, i + 1, pol))
        adj = np.empty_like(Pout)
        adj[:, 0, 0] = Pout[:, 1, 1]
        adj[:, 0, 1] = -Pout[:, 0, 1]
        adj[:, 1, 0] = -Pout[:, 1, 0]
        adj[:, 1, 1] = Pout[:, 0, 0]
        T = adj @ Pin / det_out
        det_num = np.linalg.det(Pin) / np.linalg.det(Pout)
        out.append(
            {"radius": r, "matrix": T, "det": det_num, "det_closed": det_in / det_out}
        )
    return out


def radial_traces(med, k, l_max, polarization=Polarization.TE):
    """Boundary data ``(value, riccati)`` for degrees ``0..l_max`` (core coefficient 1)."""
    pol = Polarization(polarization)
    if med.n_shells == 1:
        # the core needs j_l only; y_l may overflow where j_l is still finite
        j, dj = riccati_seq(BesselKind.J, l_max, wavenumbers(med, k)[0] * med.R)
        return j, dj / _eta(med, 0, pol)
    mats = transfer_matrices(med, k, l_max, pol)
    coef = np.zeros((l_max + 1, 2), dtype=complex)
    coef[:, 0] = 1.0
    for t in mats:
        coef = np.einsum("lij,lj->li", t["matrix"], coef)
    kap = wavenumbers(med, k)
    P, _ = _basis(kap[-1], med.R, l_max, _eta(med, med.n_shells - 1, pol))
    state = np.einsum("lij,lj->li", P, coef)
    return state[:, 0], state[:, 1]


def _trace(med, k, l, pol):
    if int(l) != l or l < 1:
        raise ValueError(f"degree must be an integer >= 1, got {l}")
    value, ric = radial_traces(med, k, l, pol)
    v, d = complex(value[l]), complex(ric[l])
    if not (cmath.isfinite(v) and cmath.isfinite(d)) or max(abs(v), abs(d)) < _TINY:
        raise DegenerateTrace(f"{pol.value} trace underflowed at l={l}, k={k}")
    return BoundaryTrace(v, d, int(l), pol)


def te_radial_trace(med, k, l):
    """Regular TE solution ``f`` at ``R``: ``(f(R), (r f)'(R))``."""
    return _trace(med, k, l, Polarization.TE)


def tm_radial_trace(med, k, l):
    """Regular TM solution ``g`` at ``R``: ``(g(R), (r g)'(R) / eps_outer)``."""
    return _trace(med, k, l, Polarization.TM)


def te_impedances(med, k, l_max):
    """Surface impedances ``Z_l`` for ``l = 1..l_max`` plus a resonance mask.

    Entries flagged in the mask satisfy ``|f(R)| < 1e-12 |(r f)'(R)|`` and hold
    ``nan``.
    """
    value, ric = radial_traces(med, k, l_max, Polarization.TE)
    value, ric = value[1:], ric[1:]
    resonant = np.abs(value) < RESONANCE_RTOL * np.abs(ric)
    with np.errstate(divide="ignore", invalid="ignore"):
        Z = np.where(resonant, np.nan, ric / (med.R * value))
    return Z, resonant


def te_impedance(med, k, l):
    """``Z_l = (r f)'(R) / (R f(R))`` for the regular TE solution."""
    tr = te_radial_trace(med, k, l)
    if abs(tr.value_at_R) < RESONANCE_RTOL * abs(tr.riccati_at_R):
        raise InteriorResonance(l)
    return tr.riccati_at_R / (med.R * tr.value_at_R)


def check_assumption(med, k, l_max, rtol=ASSUMPTION_RTOL):
    """Find degrees at which the homogeneous filtered-trace problem is solvable.

    A TM mode solves it when ``g(R) = 0``; a TE mode solves it when
    ``f(R) = 0``. A degree is flagged when ``|value| <= rtol |riccati|``.
    Any absorbing shell rules out both cases.
    """
    if med.is_absorbing:
        return AssumptionReport(float(k), int(l_max))
    flagged = {}
    for pol in Polarization:
        value, ric = radial_traces(med, k, l_max, pol)
        resid = np.abs(value[1:]) / np.abs(ric[1:])
        degs = tuple(int(l) for l in np.nonzero(resid <= rtol)[0] + 1)
        flagged[pol] = (degs, tuple(float(r) for r in resid))
    return AssumptionReport(
        float(k),
        int(l_max),
        tm_degrees=flagged[Polarization.TM][0],
        te_degrees=flagged[Polarization.TE][0],
        residuals_tm=flagged[Polarization.TM][1],
        residuals_te=flagged[Polarization.TE][1],
    )
