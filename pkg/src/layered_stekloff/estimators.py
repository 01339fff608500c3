"""scikit-learn style front ends.

The estimators wrap the functional core so that spectra and diagonal
operators compose with pipelines, ``get_params``/``set_params`` and cloning.
Coefficient arrays ``X`` have shape ``(n_samples, L (L + 2))`` and hold the
divergence-free (CURL) coefficients of tangential fields in flat mode order.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    check_coefficients,
    check_degree,
    check_delta,
    check_medium,
    check_wavenumber,
    degree_from_n_modes,
)
from .scattering import detect_eigenvalues
from .stekloff import Flavor, psi_operator, spectrum
from .surface import SurfaceSpectrum, smoothing_factors


class SmoothingTransformer(TransformerMixin, BaseEstimator):
    """Apply ``S_delta`` to divergence-free coefficient vectors.

    Parameters
    ----------
    delta : float, default=0.0
        Smoothing order; ``0`` gives the identity on divergence-free fields.
    radius : float, default=1.0
        Sphere radius entering ``mu = l(l+1)/R^2``.
    """

    def __init__(self, delta=0.0, radius=1.0):
        self.delta = delta
        self.radius = radius

    def fit(self, X, y=None):
        delta = check_delta(self.delta)
        X = check_coefficients(X)
        self.l_max_ = degree_from_n_modes(X.shape[1])
        self.n_features_in_ = X.shape[1]
        self.factors_ = smoothing_factors(delta, SurfaceSpectrum(self.radius, self.l_max_))
        return self

    def transform(self, X):
        check_is_fitted(self, "factors_")
        X = check_coefficients(X, self.n_features_in_)
        return X * self.factors_

    def inverse_transform(self, X):
        check_is_fitted(self, "factors_")
        X = check_coefficients(X, self.n_features_in_)
        return X / self.factors_


class DeltaStekloffSolver(BaseEstimator):
    """Compute the delta-Stekloff spectrum of a medium and its solution operator.

    ``fit`` takes a ``LayeredMedium`` (or a ``{"radii", "eps"}`` mapping) in
    place of a data matrix; ``transform`` applies the fitted diagonal operator
    to coefficient vectors.

    Attributes
    ----------
    records_ : list of EigRecord
    eigenvalues_ : ndarray of complex, sorted as ``records_``
    operator_ : ShiftedDiagonalOperator
    shift_ : float
    """

    def __init__(self, k=1.0, delta=0.0, l_max=10, shift=None, flavor="PSI"):
        self.k = k
        self.delta = delta
        self.l_max = l_max
        self.shift = shift
        self.flavor = flavor

    def fit(self, X, y=None):
        med = check_medium(X)
        k = check_wavenumber(self.k)
        delta = check_delta(self.delta)
        l_max = check_degree(self.l_max)
        self.medium_ = med
        self.records_ = spectrum(med, k, delta, l_max)
        self.eigenvalues_ = np.array([r.lam for r in self.records_], dtype=complex)
        self.operator_ = psi_operator(med, k, delta, self.shift, l_max, Flavor(self.flavor))
        self.shift_ = self.operator_.z
        self.n_features_in_ = l_max * (l_max + 2)
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = check_coefficients(X, self.n_features_in_)
        return X * self.operator_.flat_entries()

    def operator_eigenvalues(self):
        """Eigenvalues ``1/(lambda - z)`` of the fitted operator, one per degree."""
        check_is_fitted(self, "operator_")
        return self.operator_.entries.copy()


class FarFieldEigenvalueDetector(BaseEstimator):
    """Locate eigenvalues as zeros of synthetic modified far-field entries.

    ``fit`` takes the scattering medium; the measured coefficients are
    generated from it and compared with the auxiliary problem.
    """

    def __init__(self, k=1.0, delta=0.0, degrees=(1, 2, 3), method="moebius",
                 noise=0.0, random_state=None):
        self.k = k
        self.delta = delta
        self.degrees = degrees
        self.method = method
        self.noise = noise
        self.random_state = random_state

    def fit(self, X, y=None):
        med = check_medium(X)
        k = check_wavenumber(self.k)
        delta = check_delta(self.delta)
        degrees = [check_degree(l, "degree") for l in self.degrees]
        rng = np.random.default_rng(self.random_state)
        self.degrees_ = np.array(degrees, dtype=int)
        self.detected_ = np.array(
            [detect_eigenvalues(med, k, delta, l, self.method, self.noise, rng) for l in degrees],
            dtype=complex,
        )
        return self

    def predict(self, X=None):
        check_is_fitted(self, "detected_")
        return self.detected_.copy()
