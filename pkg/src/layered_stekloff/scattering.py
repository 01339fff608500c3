"""Per-mode far-field data of the layered sphere and eigenvalue detection.

For a concentric scatterer the far field operator is diagonal in the vector
spherical harmonics, so each operator below is represented by one complex
number per degree and polarization: the ratio of the outgoing
(``h_l^(1)``) to the incident (``j_l``) radial amplitude. The common far-field
normalisation of a mode cancels in the difference ``mie - aux``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import (
    DegenerateMoebius,
    IllPosedParameter,
    IllPosedParameterWarning,
    InvalidMedium,
    NoRootInWindow,
)
from .radial import Polarization, radial_traces
from .specfun import BesselKind, riccati_seq


@dataclass(frozen=True)
class ModeScattering:
    l: int
    mie_te: complex
    mie_tm: complex
    aux_te: complex
    aux_tm: complex

    @property
    def modified_te(self):
        return self.mie_te - self.aux_te

    @property
    def modified_tm(self):
        return self.mie_tm - self.aux_tm


def _exterior(k, R, l):
    """``(j, (r j)', h, (r h)')`` at ``r = R`` for the vacuum wavenumber ``k``."""
    j, dj = riccati_seq(BesselKind.J, l, k * R)
    h, dh = riccati_seq(BesselKind.H1, l, k * R)
    return j[l], dj[l], h[l], dh[l]


def _match(value, ric, j, dj, h, dh):
    # a*value = j + s*h,  a*ric = dj + s*dh
    return (value * dj - ric * j) / (ric * h - value * dh)


def mie_coefficients(med, k, l):
    """Scattering coefficients ``(te, tm)`` of the layered sphere in vacuum."""
    if not k > 0:
        raise InvalidMedium(f"wavenumber must be positive, got {k}")
    if int(l) != l or l < 1:
        raise ValueError(f"degree must be an integer >= 1, got {l}")
    j, dj, h, dh = _exterior(k, med.R, l)
    out = []
    for pol in (Polarization.TE, Polarization.TM):
        value, ric = radial_traces(med, k, l, pol)
        out.append(complex(_match(value[l], ric[l], j, dj, h, dh)))
    return tuple(out)


def auxiliary_coefficients(R, k, lam, delta, l):
    """Coefficients ``(te, tm)`` of the exterior impedance problem on ``|x| = R``.

    The TE boundary condition reads ``(r u)'(R)/R + lam mu^-delta u(R) = 0`` for
    the total radial field ``u = j + s h``. ``S_delta`` removes TM traces, so
    the TM condition is ``u(R) = 0`` regardless of ``lam``.

    ``Im(lam) < 0`` is outside the guaranteed well-posed regime; the value is
    still returned (with ``IllPosedParameterWarning``) unless the denominator
    vanishes, which raises ``IllPosedParameter``.
    """
    lam = complex(lam)
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    j, dj, h, dh = _exterior(k, R, l)
    g = lam * (l * (l + 1.0) / R**2) ** (-float(delta))
    num = dj / R + g * j
    den = dh / R + g * h
    if lam.imag < 0:
        if den == 0:
            raise IllPosedParameter(f"auxiliary problem singular at lambda={lam}")
        warnings.warn(
            f"auxiliary problem evaluated at Im(lambda)={lam.imag:.3g} < 0",
            IllPosedParameterWarning,
        )
    return complex(-num / den), complex(-j / h)


def mode_scattering(med, k, lam, delta, l):
    mie_te, mie_tm = mie_coefficients(med, k, l)
    aux_te, aux_tm = auxiliary_coefficients(med.R, k, lam, delta, l)
    return ModeScattering(int(l), mie_te, mie_tm, aux_te, aux_tm)


def modified_ff_entry(med, k, lam, delta, l):
    """Diagonal entries ``(te, tm)`` of ``F - F_lambda`` for degree ``l``."""
    ms = mode_scattering(med, k, lam, delta, l)
    return ms.modified_te, ms.modified_tm


class ModifiedFarFieldData:
    """Synthetic measurement of the TE modified far-field entry as a function of ``lam``.

    The physical coefficient is computed once (it is the measured data); each
    call evaluates the auxiliary coefficient and optionally perturbs the
    difference by complex noise of relative size ``noise``.
    """

    def __init__(self, med, k, delta, l, noise=0.0, rng=None):
        self.med, self.k, self.delta, self.l = med, k, float(delta), int(l)
        self.noise = float(noise)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.mie_te = mie_coefficients(med, k, l)[0]

    @property
    def scale(self):
        """Natural magnitude of eigenvalues at this degree: ``mu^delta (l+1)/R``."""
        R = self.med.R
        return (self.l * (self.l + 1.0) / R**2) ** self.delta * (self.l + 1.0) / R

    def __call__(self, lam):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IllPosedParameterWarning)
            aux = auxiliary_coefficients(self.med.R, self.k, lam, self.delta, self.l)[0]
        e = self.mie_te - aux
        if self.noise:
            phase = self.rng.uniform(0.0, 2.0 * math.pi)
            e = e + self.noise * abs(e) * complex(math.cos(phase), math.sin(phase))
        return e


_MOEBIUS_NODES = (1j, -1.0 + 1j, 1.0 + 1j, -2.0 + 0.5j)


def moebius_root(data, nodes, scale=1.0):
    """Zero of the Moebius map ``(a x + b)/(c x + d)`` through samples at ``lam = scale x``.

    The coefficients span the null space of ``[x, 1, -e x, -e]``; with more
    than three nodes the smallest singular vector is a least-squares fit.
    """
    x = np.asarray(nodes, dtype=complex)
    e = np.array([data(scale * xi) for xi in x], dtype=complex)
    emax = np.max(np.abs(e))
    if np.max(np.abs(e - e[0])) <= 1e-13 * emax:
        raise DegenerateMoebius("modified far-field entry does not depend on lambda")
    es = e / emax
    _, _, vh = np.linalg.svd(np.column_stack([x, np.ones_like(x), -es * x, -es]))
    a, b, _, _ = np.conj(vh[-1])
    if abs(a) <= 1e-12 * abs(b):
        raise DegenerateMoebius("fitted Moebius map has no finite zero")
    return complex(-scale * b / a)


def _grid_refine(data, window, n_grid):
    (re_lo, re_hi), (im_lo, im_hi) = window
    re = np.linspace(re_lo, re_hi, n_grid)
    im = np.linspace(im_lo, im_hi, max(2, n_grid // 4))
    grid = re[None, :] + 1j * im[:, None]
    vals = np.abs(np.vectorize(data, otypes=[complex])(grid))
    start = grid.flat[int(np.argmin(vals))]
    step = (re_hi - re_lo) / (n_grid - 1)
    try:
        root = optimize.newton(data, start, x1=start + 0.5 * step, tol=1e-14, maxiter=100)
    except RuntimeError as exc:
        raise NoRootInWindow(f"refinement did not converge: {exc}") from exc
    root = complex(root)
    pad = 1e-9 * max(1.0, abs(root))
    if not (re_lo - pad <= root.real <= re_hi + pad and im_lo - pad <= root.imag <= im_hi + pad):
        raise NoRootInWindow(f"root {root} lies outside the search window")
    return root


def detect_eigenvalues(med, k, delta, l, method="moebius", noise=0.0, rng=None,
                       window=None, n_grid=201):
    """Recover the eigenvalue of degree ``l`` from modified far-field entries.

    Parameters
    ----------
    method : {"moebius", "grid"}
        ``"moebius"`` fits the entry's Moebius dependence on ``lam`` through
        four samples scaled by ``mu^delta (l+1)/R`` and returns its zero in
        closed form. ``"grid"`` scans ``window`` (``((re_lo, re_hi), (im_lo,
        im_hi))``, default ``+-3 scale`` by ``[-scale, scale]``) for the
        smallest entry and refines with a secant iteration.
    noise : float
        Relative complex noise added to every sampled entry.
    """
    data = ModifiedFarFieldData(med, k, delta, l, noise=noise, rng=rng)
    scale = data.scale
    if method == "moebius":
        return moebius_root(data, _MOEBIUS_NODES, scale)
    if method == "grid":
        if window is None:
            window = ((-3.0 * scale, 3.0 * scale), (-scale, scale))
        return _grid_refine(data, window, n_grid)
    raise ValueError(f"unknown detection method {method!r}")
