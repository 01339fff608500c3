"""Named invariant checks over random layered media.

Every check takes a ``numpy.random.Generator`` and returns a ``Check``. The
suite is what ``selftest`` runs; the acceptance tests call the same functions
at their stated tolerances.
"""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special

from .errors import ResonanceWarning
from .radial import LayeredMedium, Polarization, check_assumption, radial_traces
from .scattering import detect_eigenvalues
from .specfun import BesselKind, derivative_seq, sph_bessel
from .stekloff import (
    Flavor,
    contrast_family,
    delta_sweep,
    psi_operator,
    spectrum,
    tail_slope,
    trace_sum_diagnostic,
)
from .surface import (
    SurfaceSpectrum,
    TangentialField,
    apply_smoothing,
    duality_pairing,
)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _le(name, value, tol, detail=""):
    value = float(value)
    return Check(name, value, float(tol), bool(value <= tol), detail)


def random_medium(rng, n_layers=3, absorbing=False, radius=1.0):
    """Concentric medium with ``n_layers`` shells, ``Re eps`` in [1, 6].

    Interfaces are drawn in ``(0.2 R, R)``. With ``absorbing`` every shell
    gets ``Im eps`` in ``(0, 1]``.
    """
    inner = np.sort(rng.uniform(0.2 * radius, radius, n_layers - 1))
    radii = tuple(inner) + (float(radius),)
    re = rng.uniform(1.0, 6.0, n_layers)
    im = 1.0 - rng.uniform(0.0, 1.0, n_layers) if absorbing else np.zeros(n_layers)
    return LayeredMedium(radii, tuple(re + 1j * im))


def _spectra(med, k, delta, l_max):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResonanceWarning)
        return spectrum(med, k, delta, l_max)


# -- special functions ------------------------------------------------------

def wronskian_grid(rng, n_points=60, r_range=(0.1, 50.0), max_arg=math.pi / 3):
    """Random points with ``|z|`` log-uniform in ``r_range`` and ``|arg z| <= max_arg``."""
    mod = 10.0 ** rng.uniform(*np.log10(r_range), n_points)
    return mod * np.exp(1j * rng.uniform(-max_arg, max_arg, n_points))


def wronskian_residuals(l_max, z):
    """Absolute and cancellation-scaled Wronskian residuals for orders ``0..l_max``.

    ``j y' - j' y`` is a difference of two terms of size ``e^{2 |Im z|}``; the
    scaled residual divides by ``|j y'| + |j' y|`` so it measures relative
    accuracy of the functions rather than that cancellation.
    """
    j, dj = derivative_seq(BesselKind.J, l_max, z)
    y, dy = derivative_seq(BesselKind.Y, l_max, z)
    a, b = j * dy, dj * y
    resid = np.abs(a - b - 1.0 / (z * z))
    return resid, resid / (np.abs(a) + np.abs(b))


def check_wronskian(rng, l_max=40, n_points=60):
    """Scaled Wronskian residual over ``|z|`` in [0.1, 50], ``|arg z| <= pi/3``."""
    worst = 0.0
    for z in wronskian_grid(rng, n_points):
        worst = max(worst, float(np.max(wronskian_residuals(l_max, complex(z))[1])))
    return _le("wronskian_scaled_residual", worst, 1e-10, f"l <= {l_max}, {n_points} points")


def check_closed_forms(rng, n_points=50):
    """``j_0 = sin z/z``, ``y_0 = -cos z/z``, ``h_0 = -i e^{iz}/z`` near the real axis."""
    zs = list(rng.uniform(0.1, 10, n_points) + 1j * rng.uniform(-1, 1, n_points))
    zs += [math.pi, math.pi / 2, 2.0, 1 + 0.5j]
    worst = 0.0
    for z in zs:
        z = complex(z)
        pairs = [
            (sph_bessel(BesselKind.J, 0, z), np.sin(z) / z),
            (sph_bessel(BesselKind.Y, 0, z), -np.cos(z) / z),
            (sph_bessel(BesselKind.H1, 0, z), -1j * np.exp(1j * z) / z),
        ]
        worst = max(worst, *(abs(a - b) / max(abs(b), 1.0) for a, b in pairs))
    return _le("closed_form_order_zero", worst, 1e-13)


# -- smoothing operator -----------------------------------------------------

def check_smoothing_algebra(rng, n_fields=100, l_max=10):
    """Semigroup, symmetry and half-power factorization of ``S_delta``."""
    spec = SurfaceSpectrum(1.0, l_max)
    worst = 0.0
    for _ in range(n_fields):
        xi = TangentialField.random(spec, rng)
        eta = TangentialField.random(spec, rng)
        d1, d2 = rng.uniform(0.0, 1.5, 2)
        d = d1 + d2
        scale = np.linalg.norm(xi.coeffs)
        semi = apply_smoothing(d1, apply_smoothing(d2, xi)).coeffs - apply_smoothing(d, xi).coeffs
        half = apply_smoothing(d / 2, apply_smoothing(d / 2, xi)).coeffs - apply_smoothing(d, xi).coeffs
        sym = duality_pairing(apply_smoothing(d, xi), eta) - duality_pairing(xi, apply_smoothing(d, eta))
        worst = max(
            worst,
            np.max(np.abs(semi)) / scale,
            np.max(np.abs(half)) / scale,
            abs(sym) / (scale * np.linalg.norm(eta.coeffs)),
        )
    return _le("smoothing_algebra", worst, 1e-13, f"{n_fields} random field pairs")


# -- spectra ----------------------------------------------------------------

DELTAS = (0.0, 0.5, 1.5)


def check_reality(rng, n_media=10, l_max=20, k=1.0):
    """Real media have real eigenvalues."""
    worst = 0.0
    for _ in range(n_media):
        med = random_medium(rng)
        for delta in DELTAS:
            for r in _spectra(med, k, delta, l_max):
                worst = max(worst, abs(r.lam.imag) / (1.0 + abs(r.lam)))
    return _le("real_media_real_spectrum", worst, 1e-10)


def check_upper_half_plane(rng, n_media=10, l_max=20, k=1.0):
    """Absorbing media keep every eigenvalue in ``Im lambda >= 0``."""
    worst = 0.0
    for _ in range(n_media):
        med = random_medium(rng, absorbing=True)
        for delta in DELTAS:
            for r in _spectra(med, k, delta, l_max):
                worst = max(worst, -r.lam.imag / (1.0 + abs(r.lam)))
    return _le("absorbing_media_upper_half_plane", worst, 1e-10)


def check_correspondence(rng, n_media=4, l_max=20, k=1.0):
    """``mu^-delta t_l = 1/(lambda_l - z)`` and PSI/PSI_TILDE agreement."""
    worst = 0.0
    worst_flavor = 0.0
    media = [random_medium(rng) for _ in range(n_media // 2)]
    media += [random_medium(rng, absorbing=True) for _ in range(n_media - len(media))]
    for med in media:
        for delta in DELTAS:
            lams = {r.l: r.lam for r in _spectra(med, k, delta, l_max)}
            for z in (0.0, -2.5, 3.7):
                try:
                    t_op = psi_operator(med, k, delta, z, l_max, Flavor.T)
                except Exception:
                    continue
                mu = t_op.degrees * (t_op.degrees + 1.0) / med.R**2
                for l, t, m in zip(t_op.degrees, t_op.entries, mu):
                    if int(l) not in lams:
                        continue
                    target = 1.0 / (lams[int(l)] - z)
                    err = abs(m ** (-delta) * t - target) / (1.0 + abs(target))
                    worst = max(worst, err)
                psi = psi_operator(med, k, delta, z, l_max, Flavor.PSI).entries
                tilde = psi_operator(med, k, delta, z, l_max, Flavor.PSI_TILDE).entries
                worst_flavor = max(worst_flavor, float(np.max(np.abs(psi - tilde) / np.abs(tilde))))
    return [
        _le("solution_operator_correspondence", worst, 1e-10),
        _le("psi_flavors_agree", worst_flavor, 1e-12),
    ]


def check_tail_decay(rng, l_max=40, k=1.0):
    """Tail-norm slopes against ``mu_M`` and the trace-sum verdicts."""
    media = [LayeredMedium.homogeneous(1.0), random_medium(rng)]
    out = []
    margin = 0.15
    worst_excess = -math.inf
    for med in media:
        for delta in DELTAS:
            op = psi_operator(med, k, delta, None, l_max, Flavor.PSI)
            slope = tail_slope(op)
            worst_excess = max(worst_excess, slope - (-(1.0 + delta) / 2.0 + margin))
    out.append(_le("tail_norm_slope_excess", worst_excess, 0.0, "slope minus bound"))
    verdicts = []
    for med in media:
        conv = trace_sum_diagnostic(psi_operator(med, k, 1.5, None, l_max)).converged
        div = trace_sum_diagnostic(psi_operator(med, k, 0.0, None, l_max)).converged
        verdicts.append(conv and not div)
    n_bad = len(verdicts) - sum(verdicts)
    out.append(_le("trace_sum_verdicts", n_bad, 0, "converges at 1.5, diverges at 0"))
    return out


def check_delta_convergence(rng, n_media=3, degrees=(1, 3, 5), k=1.0):
    """Eigenvalue drift is linear in ``delta`` as ``delta -> 0``."""
    grid = np.logspace(-3, -1, 9)
    media = [LayeredMedium.homogeneous(1.0)] + [random_medium(rng) for _ in range(n_media - 1)]
    rates = [delta_sweep(med, k, l, grid).exponent for med in media for l in degrees]
    lo, hi = min(rates), max(rates)
    return Check(
        "delta_drift_exponent", hi if abs(hi - 1) > abs(lo - 1) else lo, 0.1,
        bool(0.9 <= lo and hi <= 1.1), f"range [{lo:.4f}, {hi:.4f}], target [0.9, 1.1]",
    )


def contrast_distances(med0, k, delta, l_max, ts=(1e-1, 1e-2, 1e-3), shell=-1):
    """Per-degree ``|lambda_t - lambda_0|`` for ``eps_t = eps_0 + t`` on one shell."""
    shell = shell % med0.n_shells
    base = {r.l: r.lam for r in _spectra(med0, k, delta, l_max)}
    rows = []
    for med in contrast_family(med0, shell, ts):
        lam = {r.l: r.lam for r in _spectra(med, k, delta, l_max)}
        rows.append([abs(lam[l] - base[l]) for l in sorted(base)])
    return np.array(rows)


def check_epsilon_stability(rng, n_media=3, l_max=5, k=1.0):
    """Distances shrink monotonically with successive ratios in ``[8, 12]``."""
    lo, hi = math.inf, -math.inf
    for i in range(n_media):
        med = random_medium(rng)
        dist = contrast_distances(med, k, DELTAS[i % len(DELTAS)], l_max)
        ratios = dist[:-1] / dist[1:]
        lo, hi = min(lo, ratios.min()), max(hi, ratios.max())
    return Check(
        "epsilon_stability_ratio", lo if abs(lo - 10) > abs(hi - 10) else hi, 2.0,
        bool(8.0 <= lo and hi <= 12.0), f"ratios in [{lo:.4f}, {hi:.4f}], target [8, 12]",
    )


def check_detection(rng, n_media=3, l_max=10, k=1.0, noise=1e-6):
    """Far-field detection against the closed-form eigenvalues."""
    media = [LayeredMedium.homogeneous(1.0)] + [random_medium(rng) for _ in range(n_media - 1)]
    clean = noisy = 0.0
    for med in media:
        for delta in (0.0, 1.0):
            lams = {r.l: r.lam for r in _spectra(med, k, delta, l_max)}
            for l, lam in lams.items():
                clean = max(clean, abs(detect_eigenvalues(med, k, delta, l) - lam) / abs(lam))
                got = detect_eigenvalues(med, k, delta, l, noise=noise, rng=rng)
                noisy = max(noisy, abs(got - lam) / abs(lam))
    return [
        _le("detection_relative_error", clean, 1e-8),
        _le("detection_relative_error_noisy", noisy, 1e-4, f"relative noise {noise:g}"),
    ]


def check_assumption_checker(rng, n_absorbing=5):
    """Known TM resonance flagged, a regular wavenumber clear, absorbers always clear."""
    vac = LayeredMedium.homogeneous(1.0)
    flagged = 1 in check_assumption(vac, 4.4934095, 1).tm_degrees
    clear = check_assumption(vac, 1.0, 1).all_clear
    absorbing = all(
        check_assumption(random_medium(rng, absorbing=True), rng.uniform(0.5, 10), 10).all_clear
        for _ in range(n_absorbing)
    )
    n_bad = 3 - (flagged + clear + absorbing)
    return _le("assumption_checker", n_bad, 0, "resonance flagged, k=1 clear, absorbers clear")


# -- radial cross-check -----------------------------------------------------

def ode_traces(med, k, l_max, polarization=Polarization.TE, rtol=1e-12):
    """Boundary data from adaptive integration of ``u'' + (kappa^2 - l(l+1)/r^2) u = 0``.

    ``u = r f`` (TE) or ``r g`` (TM). The start at ``r0`` uses the regular
    Bessel solution of the core; across interfaces ``u`` and ``u'/eta`` are
    continuous (``eta = 1`` for TE, ``eps`` for TM). Returns arrays over
    degrees ``1..l_max`` in the normalization of ``radial_traces``.
    """
    pol = Polarization(polarization)
    ls = np.arange(1, l_max + 1)
    ll = ls * (ls + 1.0)
    kap = [k * np.sqrt(complex(e)) for e in med.eps]
    eta = [1.0 if pol is Polarization.TE else complex(e) for e in med.eps]
    r0 = 0.1 * med.radii[0]
    x0 = kap[0] * r0
    j0 = special.spherical_jn(ls, x0)
    dj0 = special.spherical_jn(ls, x0, derivative=True)
    u0 = r0 * j0
    du0 = j0 + x0 * dj0
    # one common scale per degree keeps every component O(1) at the start
    y = np.concatenate([np.ones(l_max), du0 / u0]).astype(complex)
    lo = r0
    for i, hi in enumerate(med.radii):
        kk = kap[i] ** 2

        def rhs(r, s, kk=kk):
            u, du = s[:l_max], s[l_max:]
            return np.concatenate([du, (ll / r**2 - kk) * u])

        sol = integrate.solve_ivp(rhs, (lo, hi), y, method="DOP853", rtol=rtol, atol=1e-300)
        if not sol.success:
            raise RuntimeError(sol.message)
        y = sol.y[:, -1].copy()
        if i + 1 < med.n_shells:
            y[l_max:] *= eta[i + 1] / eta[i]
        lo = hi
    u, du = y[:l_max] * u0, y[l_max:] * u0
    return u / med.R, du / eta[-1]


def check_radial_cross_oracle(rng, n_media=10, l_max=10, k=1.0):
    """Transfer-matrix traces against adaptive ODE integration."""
    worst = 0.0
    for _ in range(n_media):
        med = random_medium(rng)
        for pol in Polarization:
            v, d = radial_traces(med, k, l_max, pol)
            ov, od = ode_traces(med, k, l_max, pol)
            worst = max(
                worst,
                float(np.max(np.abs(v[1:] - ov) / np.abs(ov))),
                float(np.max(np.abs(d[1:] - od) / np.abs(od))),
            )
    return _le("radial_ode_cross_check", worst, 1e-8)


SUITE = (
    check_wronskian,
    check_closed_forms,
    check_smoothing_algebra,
    check_reality,
    check_upper_half_plane,
    check_correspondence,
    check_tail_decay,
    check_delta_convergence,
    check_epsilon_stability,
    check_detection,
    check_assumption_checker,
    check_radial_cross_oracle,
)


def run_check(index, seed):
    """Run ``SUITE[index]`` with a generator derived from ``(seed, index)``."""
    rng = np.random.default_rng([int(seed), int(index)])
    result = SUITE[index](rng)
    return list(result) if isinstance(result, list) else [result]
