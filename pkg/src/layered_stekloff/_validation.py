"""Input validation helpers shared by the estimators and the CLI."""

import math
import numbers

import numpy as np

from .errors import InvalidInput, InvalidMedium
from .radial import LayeredMedium


def parse_complex(value):
    """Accept a number or a ``[re, im]`` pair."""
    if isinstance(value, numbers.Number):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if isinstance(re, numbers.Real) and isinstance(im, numbers.Real):
            return complex(float(re), float(im))
    raise InvalidInput(f"cannot read complex number from {value!r}")


def check_medium(medium):
    """Return a ``LayeredMedium`` from an instance or a ``{"radii", "eps"}`` mapping."""
    if isinstance(medium, LayeredMedium):
        return medium
    if isinstance(medium, dict):
        try:
            radii = [float(r) for r in medium["radii"]]
            eps = [parse_complex(e) for e in medium["eps"]]
        except KeyError as exc:
            raise InvalidMedium(f"medium is missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise InvalidMedium(f"malformed medium: {exc}") from None
        return LayeredMedium(tuple(radii), tuple(eps))
    raise InvalidMedium(f"cannot interpret {type(medium).__name__} as a layered medium")


def check_wavenumber(k):
    if not isinstance(k, numbers.Real) or not math.isfinite(k) or k <= 0:
        raise InvalidInput(f"wavenumber must be a positive number, got {k!r}")
    return float(k)


def check_delta(delta):
    if not isinstance(delta, numbers.Real) or not math.isfinite(delta) or delta < 0:
        raise InvalidInput(f"smoothing parameter must be a number >= 0, got {delta!r}")
    return float(delta)


def check_degree(l, name="l_max", lower=1):
    if isinstance(l, bool) or not isinstance(l, numbers.Integral) or l < lower:
        raise InvalidInput(f"{name} must be an integer >= {lower}, got {l!r}")
    return int(l)


def check_coefficients(X, n_features=None):
    """Validate a 2-D array of complex mode coefficients (samples x modes)."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise InvalidInput(f"expected a 2-D coefficient array, got shape {X.shape}")
    if not np.issubdtype(X.dtype, np.number):
        raise InvalidInput(f"coefficients must be numeric, got dtype {X.dtype}")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise InvalidInput("coefficients contain NaN or infinity")
    if n_features is not None and X.shape[1] != n_features:
        raise InvalidInput(f"expected {n_features} mode coefficients, got {X.shape[1]}")
    return X


def degree_from_n_modes(n):
    """Invert ``n = L (L + 2)``; raise if ``n`` is not a full set of degrees."""
    L = int(round(math.sqrt(n + 1) - 1))
    if L < 1 or L * (L + 2) != n:
        raise InvalidInput(f"{n} coefficients do not fill degrees 1..L for any L")
    return L
