"""Spherical Bessel, Neumann and Hankel functions of complex argument.

Only integer orders are supported. Every routine returns the full sequence of
orders ``0..lmax`` because the radial solver always needs several degrees at
the same argument and the recurrences produce them anyway.

Algorithm selection
-------------------
* ``j_l`` : power series when ``|z| < l/2``; otherwise Miller's downward
  recurrence normalised against ``j_0`` or ``j_1``. The upward recurrence is
  unstable for ``j`` and is never used.
* ``y_l`` : upward recurrence from ``y_0`` and ``y_1`` on the real axis. Off
  the axis the upward recurrence runs on the Hankel function that decays into
  that half-plane and ``y_l`` is recovered as ``-i (h1_l - j_l)`` (or the
  ``h2`` analogue), which avoids the cancellation ``y_l ~ i j_l``.
* ``h1_l`` : the composition ``j_l + i y_l``, exactly as computed.
"""

import cmath
import enum
import math

import numpy as np

from .errors import DegreeTooLarge, LossOfPrecision, SingularArgument

L_CAP = 64

_SERIES_RTOL = 1e-17
_RESCALE = 1e200
_WRONSKIAN_TOL = 1e-8


class BesselKind(enum.Enum):
    J = "J"
    Y = "Y"
    H1 = "H1"


def _as_kind(kind):
    if isinstance(kind, BesselKind):
        return kind
    return BesselKind(str(kind).upper())


def _validate(kind, lmax, z, l_cap):
    if lmax < 0:
        raise ValueError(f"degree must be non-negative, got {lmax}")
    if lmax > l_cap:
        raise DegreeTooLarge(f"degree {lmax} exceeds L_CAP={l_cap}")
    if z == 0 and kind is not BesselKind.J:
        raise SingularArgument(f"{kind.value}-kind functions are singular at z=0")


def _j_series(l, z):
    # z^l / (2l+1)!! built incrementally to avoid overflow of the double factorial
    lead = complex(1.0)
    for i in range(1, l + 1):
        lead *= z / (2 * i + 1)
    term = complex(1.0)
    total = complex(1.0)
    w = -0.5 * z * z
    for k in range(1, 400):
        term *= w / (k * (2 * l + 2 * k + 1))
        total += term
        if abs(term) <= _SERIES_RTOL * abs(total):
            break
    return lead * total


def _miller_start(lneed, z):
    a = abs(z)
    return int(max(lneed, a) + 20 + 8.0 * a ** (1.0 / 3.0) + abs(z.imag))


def _j_sequence(lmax, z):
    z = complex(z)
    out = np.zeros(lmax + 1, dtype=complex)
    if z == 0:
        out[0] = 1.0
        return out
    a = abs(z)
    out[0] = cmath.sin(z) / z
    # orders with |z| >= l/2 come from Miller's algorithm
    lneed = min(lmax, int(math.floor(2.0 * a)))
    if lneed >= 1:
        n_start = _miller_start(lneed, z)
        vals = np.zeros(lneed + 1, dtype=complex)
        f_next = complex(0.0)
        f_cur = complex(1e-30)  # order n_start
        for n in range(n_start, 0, -1):
            if n <= lneed:
                vals[n] = f_cur
            f_next, f_cur = f_cur, (2 * n + 1) / z * f_cur - f_next
            if abs(f_cur) > _RESCALE:
                f_cur /= _RESCALE
                f_next /= _RESCALE
                vals /= _RESCALE
        vals[0] = f_cur
        j0 = out[0]
        j1 = cmath.sin(z) / (z * z) - cmath.cos(z) / z
        if abs(j0) >= abs(j1):
            scale = j0 / vals[0]
        else:
            scale = j1 / vals[1]
        out[: lneed + 1] = vals * scale
        out[0] = j0
    for l in range(max(1, lneed + 1), lmax + 1):
        out[l] = _j_series(l, z)
    return out


def _upward(f0, f1, lmax, z):
    out = np.zeros(lmax + 1, dtype=complex)
    out[0] = f0
    if lmax >= 1:
        out[1] = f1
    for n in range(1, lmax):
        out[n + 1] = (2 * n + 1) / z * out[n] - out[n - 1]
    return out


def _y_sequence(lmax, z):
    z = complex(z)
    if z.imag == 0.0:
        c, s = cmath.cos(z), cmath.sin(z)
        out = _upward(-c / z, -c / (z * z) - s / z, lmax, z)
    else:
        # Off the real axis y_l = i j_l + (Hankel part) cancels, so recur on the
        # Hankel function that decays into the half-plane and recombine.
        j = _j_sequence(lmax, z)
        if z.imag > 0:
            e = cmath.exp(1j * z)
            h = _upward(-1j * e / z, -e * (z + 1j) / (z * z), lmax, z)
            out = -1j * (h - j)
        else:
            e = cmath.exp(-1j * z)
            h = _upward(1j * e / z, -e * (z - 1j) / (z * z), lmax, z)
            out = 1j * (h - j)
    if not np.all(np.isfinite(out)):
        raise LossOfPrecision(f"y_l overflowed for lmax={lmax}, z={z}")
    return out


def _minus_one(kind, z):
    """Order -1 member of each family, used by the derivative identities."""
    if kind is BesselKind.J:
        return cmath.cos(z) / z
    if kind is BesselKind.Y:
        return cmath.sin(z) / z
    return cmath.cos(z) / z + 1j * (cmath.sin(z) / z)


def sph_bessel_seq(kind, lmax, z, l_cap=L_CAP):
    """Return ``f_l(z)`` for ``l = 0..lmax`` as a complex array.

    Parameters
    ----------
    kind : BesselKind or {"J", "Y", "H1"}
    lmax : int
        Highest order, at most ``l_cap``.
    z : complex
        Argument; ``z = 0`` is only allowed for the J kind.
    """
    kind = _as_kind(kind)
    z = complex(z)
    _validate(kind, lmax, z, l_cap)
    if kind is BesselKind.J:
        return _j_sequence(lmax, z)
    if kind is BesselKind.Y:
        return _y_sequence(lmax, z)
    return _j_sequence(lmax, z) + 1j * _y_sequence(lmax, z)


def sph_bessel(kind, l, z, l_cap=L_CAP):
    """Spherical Bessel (J), Neumann (Y) or Hankel (H1) function of order ``l``."""
    return complex(sph_bessel_seq(kind, l, z, l_cap)[l])


def riccati_seq(kind, lmax, z, l_cap=L_CAP):
    """Return ``(f, dzf)`` with ``f[l] = f_l(z)`` and ``dzf[l] = d/dz [z f_l(z)]``."""
    kind = _as_kind(kind)
    z = complex(z)
    f = sph_bessel_seq(kind, lmax, z, l_cap)
    if z == 0:
        dzf = np.zeros(lmax + 1, dtype=complex)
        dzf[0] = 1.0
        return f, dzf
    lower = np.empty(lmax + 1, dtype=complex)
    lower[0] = _minus_one(kind, z)
    lower[1:] = f[:-1]
    dzf = z * lower - np.arange(lmax + 1) * f
    return f, dzf


def riccati_derivative(kind, l, z, l_cap=L_CAP):
    """``d/dz [z f_l(z)]`` via ``(z f_l)' = z f_{l-1} - l f_l``."""
    return complex(riccati_seq(kind, l, z, l_cap)[1][l])


def derivative_seq(kind, lmax, z, l_cap=L_CAP):
    """Ordinary derivatives ``f_l'(z) = f_{l-1}(z) - (l+1) f_l(z) / z``."""
    kind = _as_kind(kind)
    z = complex(z)
    if z == 0:
        raise SingularArgument("derivative_seq requires z != 0")
    f = sph_bessel_seq(kind, lmax, z, l_cap)
    lower = np.empty(lmax + 1, dtype=complex)
    lower[0] = _minus_one(kind, z)
    lower[1:] = f[:-1]
    return f, lower - (np.arange(lmax + 1) + 1) * f / z


def wronskian_residual(l, z, l_cap=L_CAP):
    """``j_l y_l' - j_l' y_l - 1/z**2``, which vanishes identically."""
    z = complex(z)
    if z == 0:
        raise SingularArgument("the Wronskian is singular at z=0")
    j, dj = derivative_seq(BesselKind.J, l, z, l_cap)
    y, dy = derivative_seq(BesselKind.Y, l, z, l_cap)
    return complex(j[l] * dy[l] - dj[l] * y[l] - 1.0 / (z * z))


def sph_bessel_pair(lmax, z, l_cap=L_CAP):
    """Return ``(j, y)`` sequences and check them against the Wronskian.

    Raises
    ------
    LossOfPrecision
        If ``|z^2 W - 1|`` exceeds ``1e-8`` at any order.
    """
    z = complex(z)
    if z == 0:
        raise SingularArgument("y_l is singular at z=0")
    j, dj = derivative_seq(BesselKind.J, lmax, z, l_cap)
    y, dy = derivative_seq(BesselKind.Y, lmax, z, l_cap)
    resid = np.abs((j * dy - dj * y) * z * z - 1.0)
    if not np.all(resid <= _WRONSKIAN_TOL):
        bad = int(np.argmax(resid))
        raise LossOfPrecision(
            f"Wronskian residual {resid[bad]:.3e} at l={bad}, z={z}"
        )
    return j, y
