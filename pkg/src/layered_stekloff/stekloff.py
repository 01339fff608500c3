"""delta-Stekloff spectrum of a layered ball and its diagonal solution operators.

On the sphere the boundary condition ``n x curl w - lambda S_delta w_T = 0``
acts mode by mode. For a TE mode with radial factor ``f``

    n x curl w = -(r f)'(R) curl_{dB} Y,    w_T = R f(R) curl_{dB} Y,

so the eigenvalue of degree ``l`` is ``lambda_l = -mu_l^delta Z_l`` with the
surface impedance ``Z_l = (r f)'(R) / (R f(R))``. TM traces are annihilated by
``S_delta`` and carry no eigenvalues. The solution operator ``T_z`` has entry
``t_l = -1 / (Z_l + z mu_l^-delta)``, and ``mu_l^-delta t_l = 1/(lambda_l - z)``.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AssumptionViolated,
    InvalidInput,
    RankOutOfRange,
    ResonanceWarning,
    ShiftIsEigenvalue,
)
from .radial import check_assumption, te_impedance, te_impedances
from .surface import SurfaceSpectrum, TangentialField, series_verdict

SHIFT_MARGIN = 1e-6
SHIFT_RETRIES = 8


class Flavor(enum.Enum):
    T = "T"
    PSI = "PSI"
    PSI_TILDE = "PSI_TILDE"


@dataclass(frozen=True)
class EigRecord:
    lam: complex
    l: int
    multiplicity: int
    delta: float
    mu: float


def _mu(med, l):
    return l * (l + 1.0) / med.R**2


def eigenvalue_te(med, k, delta, l):
    """Eigenvalue carried by the TE modes of degree ``l``.

    Raises
    ------
    InteriorResonance
        If ``f(R)`` vanishes, in which case the mode has no finite eigenvalue.
    """
    if delta < 0:
        raise ValueError(f"smoothing parameter must be >= 0, got {delta}")
    mu = _mu(med, l)
    Z = te_impedance(med, k, l)
    return EigRecord(-(mu**delta) * Z, int(l), 2 * int(l) + 1, float(delta), mu)


def spectrum(med, k, delta, l_max):
    """All eigenvalues of degrees ``1..l_max`` sorted by ``(Re, Im, l)``.

    Raises
    ------
    AssumptionViolated
        If ``k`` is a TM resonance of the medium for some degree.

    Degrees whose TE trace vanishes are dropped with a ``ResonanceWarning``.
    """
    if delta < 0:
        raise ValueError(f"smoothing parameter must be >= 0, got {delta}")
    report = check_assumption(med, k, l_max)
    if report.tm_degrees:
        raise AssumptionViolated(report.tm_degrees)
    Z, resonant = te_impedances(med, k, l_max)
    skip = set(report.te_degrees) | {int(l) for l in np.nonzero(resonant)[0] + 1}
    if skip:
        warnings.warn(
            f"TE interior resonance; degrees {sorted(skip)} excluded", ResonanceWarning
        )
    records = []
    for l in range(1, l_max + 1):
        if l in skip:
            continue
        mu = _mu(med, l)
        records.append(EigRecord(-(mu**delta) * Z[l - 1], l, 2 * l + 1, float(delta), mu))
    records.sort(key=lambda r: (r.lam.real, r.lam.imag, r.l))
    return records


def _check_shift(lams, z):
    if not (np.isrealobj(z) and math.isfinite(z)):
        raise InvalidInput(f"shift must be a finite real number, got {z}")
    lams = np.asarray(lams)
    bad = np.abs(lams - z) < SHIFT_MARGIN * (1.0 + np.abs(lams))
    if np.any(bad):
        raise ShiftIsEigenvalue(f"shift z={z} is within margin of eigenvalue {lams[bad][0]}")


def choose_shift(lams, z=0.0):
    """First of ``z, z-1, ..., z-8`` that stays clear of every eigenvalue."""
    for _ in range(SHIFT_RETRIES + 1):
        try:
            _check_shift(lams, z)
            return float(z)
        except ShiftIsEigenvalue:
            z -= 1.0
    raise ShiftIsEigenvalue(f"no admissible shift found after {SHIFT_RETRIES} retries")


def t_entry(med, k, delta, z, l):
    """Diagonal entry of ``T_z`` on the CURL modes of degree ``l``."""
    mu = _mu(med, l)
    Z = te_impedance(med, k, l)
    _check_shift([-(mu**delta) * Z], z)
    return -1.0 / (Z + z * mu ** (-delta))


@dataclass(frozen=True)
class ShiftedDiagonalOperator:
    """Diagonal operator on divergence-free tangential fields, one entry per degree."""

    z: float
    delta: float
    flavor: Flavor
    radius: float
    degrees: np.ndarray
    entries: np.ndarray

    @property
    def spectrum(self):
        return SurfaceSpectrum(self.radius, int(self.degrees[-1]))

    @property
    def multiplicities(self):
        return 2 * self.degrees + 1

    def flat_entries(self):
        """Entries repeated over the ``2l+1`` orders, in flat CURL-mode order."""
        return np.repeat(self.entries, self.multiplicities)

    @property
    def n_modes(self):
        return int(np.sum(self.multiplicities))

    def apply(self, xi):
        out = np.zeros_like(xi.coeffs)
        out[:, 1] = self.flat_entries() * xi.coeffs[:, 1]
        return TangentialField(xi.spectrum, out)


def psi_operator(med, k, delta, z=None, l_max=10, flavor=Flavor.PSI):
    """Diagonal form of ``T_z``, ``Psi_z = S_{d/2} T_z S_{d/2}`` or ``S_d T_z``.

    With ``z=None`` the shift defaults to 0 and backs off by 1 up to eight
    times when it lands on an eigenvalue. An explicit ``z`` is used as is.
    """
    flavor = Flavor(flavor)
    degrees = np.arange(1, l_max + 1)
    mu = degrees * (degrees + 1.0) / med.R**2
    Z, resonant = te_impedances(med, k, l_max)
    lams = -(mu**delta) * Z
    finite = lams[~resonant]
    if z is None:
        z = choose_shift(finite)
    else:
        _check_shift(finite, z)
    # a resonant mode has f(R) = 0 and hence t_l = 0
    t = np.where(resonant, 0.0, -1.0 / (np.where(resonant, 1.0, Z) + z * mu ** (-delta)))
    if flavor is Flavor.T:
        entries = t
    elif flavor is Flavor.PSI:
        half = mu ** (-delta / 2.0)
        entries = half * t * half
    else:
        entries = mu ** (-delta) * t
    return ShiftedDiagonalOperator(float(z), float(delta), flavor, med.R, degrees, entries)


def tail_norm(op, M):
    """Norm of ``Psi - I^(M) Psi``: the largest ``|entry|`` at flat index >= M."""
    n = op.n_modes
    if int(M) != M or not 0 <= M <= n:
        raise RankOutOfRange(f"rank {M} outside [0, {n}]")
    if M == n:
        return 0.0
    return float(np.max(np.abs(op.flat_entries()[int(M):])))


def tail_norms(op):
    """``tail_norm(op, M)`` for every ``M = 0..n_modes-1`` (suffix maxima)."""
    a = np.abs(op.flat_entries())
    return np.maximum.accumulate(a[::-1])[::-1]


@dataclass(frozen=True)
class TraceDiagnostic:
    partial_sums: np.ndarray
    converged: bool
    last_block_increment: float
    expected_convergent: bool


def trace_sum_diagnostic(op, delta=None, rtol=1e-3):
    """Partial sums of the truncation errors and a convergence verdict.

    Convergent means the final degree block adds less than ``rtol`` relative.
    """
    delta = op.delta if delta is None else delta
    sums = np.cumsum(tail_norms(op))
    converged, inc = series_verdict(sums, op.multiplicities, rtol)
    return TraceDiagnostic(sums, converged, inc, bool(delta > 1))


def tail_slope(op, l_min=2):
    """Least-squares slope of ``log tail_norm`` against ``log mu_M`` over degree starts."""
    starts = np.concatenate([[0], np.cumsum(op.multiplicities)[:-1]])
    tails = tail_norms(op)[starts]
    mu = op.degrees * (op.degrees + 1.0) / op.radius**2
    keep = op.degrees >= l_min
    slope, _ = np.polyfit(np.log(mu[keep]), np.log(tails[keep]), 1)
    return float(slope)


def loglog_rate(x, y):
    """Least-squares exponent ``p`` in ``y ~ C x^p``; needs at least 4 points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise ValueError("rate fits need at least 4 points")
    p, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(p)


@dataclass(frozen=True)
class DeltaSweep:
    l: int
    deltas: np.ndarray
    lams: np.ndarray
    drifts: np.ndarray
    exponent: float


def delta_sweep(med, k, l, deltas):
    """Eigenvalue drift ``|lambda(delta) - lambda(0)| = |mu^delta - 1| |Z_l|``.

    The fitted exponent uses the strictly positive entries of ``deltas``.
    """
    deltas = np.asarray(sorted(set(float(d) for d in deltas)), dtype=float)
    if deltas.size == 0:
        raise ValueError("empty smoothing grid")
    if np.any(deltas < 0):
        raise ValueError("smoothing parameters must be >= 0")
    mu = _mu(med, l)
    Z = te_impedance(med, k, l)
    lams = -(mu**deltas) * Z
    drifts = np.abs(np.expm1(deltas * math.log(mu))) * abs(Z)
    pos = deltas > 0
    exponent = loglog_rate(deltas[pos], drifts[pos]) if np.sum(pos) >= 4 else float("nan")
    return DeltaSweep(int(l), deltas, lams, drifts, exponent)


def hausdorff(a, b):
    """Hausdorff distance between two finite subsets of the complex plane."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size == 0 or b.size == 0:
        return 0.0 if a.size == b.size else float("inf")
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def contrast_norms(med0, med1, p=6.0):
    """``(sup |eps1 - eps0|, L^p(B) norm of eps1 - eps0)`` over the ball."""
    edges = np.unique(np.concatenate([[0.0], med0.radii, med1.radii]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    diff = np.abs(med1.eps_at(mids) - med0.eps_at(mids))
    vol = 4.0 * math.pi / 3.0 * (edges[1:] ** 3 - edges[:-1] ** 3)
    return float(diff.max()), float(np.sum(vol * diff**p) ** (1.0 / p))


@dataclass(frozen=True)
class PerturbationTable:
    degrees: np.ndarray
    lam0: np.ndarray
    lam1: np.ndarray
    distances: np.ndarray
    hausdorff: float
    sup_norm: float
    lp_norm: float


def epsilon_perturb(med0, med1, k, delta, l_max):
    """Pair the spectra of two media degree by degree."""
    if not math.isclose(med0.R, med1.R):
        raise ValueError("media must share the outer radius")
    s0 = {r.l: r.lam for r in spectrum(med0, k, delta, l_max)}
    s1 = {r.l: r.lam for r in spectrum(med1, k, delta, l_max)}
    degrees = np.array(sorted(set(s0) & set(s1)), dtype=int)
    lam0 = np.array([s0[l] for l in degrees], dtype=complex)
    lam1 = np.array([s1[l] for l in degrees], dtype=complex)
    sup, lp = contrast_norms(med0, med1)
    return PerturbationTable(
        degrees, lam0, lam1, np.abs(lam1 - lam0),
        hausdorff(list(s0.values()), list(s1.values())), sup, lp,
    )


def contrast_family(med0, shell, ts):
    """Media with ``t`` added to the permittivity of one shell."""
    return [med0.with_eps(shell, med0.eps[shell] + t) for t in ts]
