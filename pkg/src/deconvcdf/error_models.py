"""Measurement-error distributions and their characteristic functions.

Every model describes the law of an additive error ``eps`` in the
contamination model ``Y = X + eps``.  The deconvolution machinery only
needs three things from a model: its characteristic function (which must
not vanish), a sampler, and its second-moment summaries.  The catalogue
covers the families used throughout the package: Laplace, Gamma (raw and
mean-centred), Gaussian, and the error-free identity model.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .exceptions import UnsupportedFamily

__all__ = [
    "ErrorModel",
    "NoError",
    "LaplaceError",
    "NormalError",
    "GammaError",
    "CenteredGammaError",
    "SmoothnessConstants",
    "parse_error_model",
    "preset_model",
]


@dataclass(frozen=True)
class SmoothnessConstants:
    """Envelope constants describing how fast a characteristic function decays.

    ``c0 * exp(-gamma*|w|**beta) <= |phi(w)| <= c1 * exp(-gamma*|w|**beta)``
    holds for all ``w``, and ``|phi(w)| >= 1 - b*|w|**tau`` holds for
    ``|w| <= omega0``.  These constants feed the theoretical bandwidth
    formulas; only supersmooth families admit them.
    """

    gamma: float
    beta: float
    c0: float
    c1: float
    omega0: float
    b: float
    tau: float


class ErrorModel(ABC):
    """Abstract additive measurement-error law."""

    family = "abstract"

    @abstractmethod
    def char_fn(self, omega):
        """Characteristic function E[exp(i*omega*eps)], vectorized in omega."""

    @abstractmethod
    def sample(self, n, rng):
        """Draw ``n`` independent errors using the generator ``rng``."""

    @property
    @abstractmethod
    def mean(self):
        """E[eps]."""

    @property
    @abstractmethod
    def variance(self):
        """Var[eps]."""

    @property
    def std(self):
        return math.sqrt(self.variance)

    @abstractmethod
    def scale_by(self, factor):
        """Return the model of ``factor * eps`` for ``factor > 0``."""

    def smoothness_constants(self):
        """Decay-envelope constants, defined for supersmooth families only."""
        raise UnsupportedFamily(
            f"{self.family!r} has no exponential decay envelope"
        )

    def params(self):
        """Serializable parameter mapping (used in manifests)."""
        return {}

    def spec_string(self):
        items = ",".join(f"{k}={v:g}" for k, v in self.params().items())
        return self.family if not items else f"{self.family}:{items}"

    def __repr__(self):
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params().items())
        return f"{type(self).__name__}({inner})"


def _broadcast(omega, values):
    """Return values with scalar inputs collapsed back to Python scalars."""
    if np.ndim(omega) == 0:
        return complex(values)
    return values


class NoError(ErrorModel):
    """Error-free model: eps = 0 almost surely, phi = 1.

    Useful as a degenerate reference; with it the deconvolution estimator
    reduces to a smoothed empirical CDF.
    """

    family = "identity"

    def char_fn(self, omega):
        w = np.asarray(omega, dtype=float)
        return _broadcast(omega, np.ones_like(w, dtype=complex))

    def sample(self, n, rng):
        return np.zeros(n)

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return 0.0

    def scale_by(self, factor):
        return NoError()


class LaplaceError(ErrorModel):
    """Laplace(0, theta) errors with density exp(-|x|/theta)/(2 theta)."""

    family = "laplace"

    def __init__(self, theta):
        if theta <= 0:
            raise ValueError("theta must be positive")
        self.theta = float(theta)

    def char_fn(self, omega):
        w = np.asarray(omega, dtype=float)
        return _broadcast(omega, (1.0 / (1.0 + self.theta**2 * w**2)).astype(complex))

    def sample(self, n, rng):
        return rng.laplace(0.0, self.theta, size=n)

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return 2.0 * self.theta**2

    def scale_by(self, factor):
        return LaplaceError(factor * self.theta)

    def params(self):
        return {"theta": self.theta}


class NormalError(ErrorModel):
    """Gaussian N(0, sigma^2) errors."""

    family = "normal"

    def __init__(self, sigma):
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)

    def char_fn(self, omega):
        w = np.asarray(omega, dtype=float)
        return _broadcast(omega, np.exp(-0.5 * self.sigma**2 * w**2).astype(complex))

    def sample(self, n, rng):
        return rng.normal(0.0, self.sigma, size=n)

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        return self.sigma**2

    def scale_by(self, factor):
        return NormalError(factor * self.sigma)

    def smoothness_constants(self):
        half_var = 0.5 * self.sigma**2
        return SmoothnessConstants(
            gamma=half_var,
            beta=2.0,
            c0=1.0,
            c1=1.0,
            omega0=math.inf,
            b=half_var,
            tau=2.0,
        )

    def params(self):
        return {"sigma": self.sigma}


class GammaError(ErrorModel):
    """Gamma(shape, scale) errors supported on the positive half line.

    The error has mean ``shape * scale``, so contamination shifts the
    observations to the right as well as spreading them.
    """

    family = "gamma"

    def __init__(self, shape=2.0, scale=1.0):
        if shape <= 0 or scale <= 0:
            raise ValueError("shape and scale must be positive")
        self.shape = float(shape)
        self.scale = float(scale)

    def char_fn(self, omega):
        w = np.asarray(omega, dtype=float)
        return _broadcast(omega, (1.0 - 1j * self.scale * w) ** (-self.shape))

    def sample(self, n, rng):
        return rng.gamma(self.shape, self.scale, size=n)

    @property
    def mean(self):
        return self.shape * self.scale

    @property
    def variance(self):
        return self.shape * self.scale**2

    def scale_by(self, factor):
        return GammaError(self.shape, factor * self.scale)

    def params(self):
        return {"k": self.shape, "theta": self.scale}


class CenteredGammaError(GammaError):
    """Gamma(shape, scale) errors shifted to zero mean."""

    family = "gamma0"

    def char_fn(self, omega):
        w = np.asarray(omega, dtype=float)
        raw = (1.0 - 1j * self.scale * w) ** (-self.shape)
        return _broadcast(omega, np.exp(-1j * w * self.shape * self.scale) * raw)

    def sample(self, n, rng):
        return super().sample(n, rng) - self.shape * self.scale

    @property
    def mean(self):
        return 0.0

    def scale_by(self, factor):
        return CenteredGammaError(self.shape, factor * self.scale)


_FAMILIES = {
    "identity": NoError,
    "none": NoError,
    "laplace": LaplaceError,
    "normal": NormalError,
    "gamma": GammaError,
    "gamma0": CenteredGammaError,
}


def parse_error_model(text):
    """Build an error model from a ``family:key=value,...`` string.

    Examples: ``"normal:sigma=0.5"``, ``"gamma:k=2,theta=0.1414"``,
    ``"identity"``.
    """
    head, _, tail = text.partition(":")
    family = head.strip().lower()
    if family not in _FAMILIES:
        known = ", ".join(sorted(set(_FAMILIES) - {"none"}))
        raise ValueError(f"unknown error family {family!r} (known: {known})")
    kwargs = {}
    if tail.strip():
        for item in tail.split(","):
            key, _, value = item.partition("=")
            if not _:
                raise ValueError(f"malformed parameter {item!r}")
            kwargs[key.strip()] = float(value)
    cls = _FAMILIES[family]
    if cls in (GammaError, CenteredGammaError):
        shape = kwargs.pop("k", kwargs.pop("shape", 2.0))
        scale = kwargs.pop("theta", kwargs.pop("scale", None))
        if scale is None:
            raise ValueError(f"{family} needs a theta parameter")
        if kwargs:
            raise ValueError(f"unknown parameters {sorted(kwargs)} for {family}")
        return cls(shape, scale)
    if cls is LaplaceError:
        try:
            return cls(kwargs.pop("theta"))
        except KeyError:
            raise ValueError("laplace needs a theta parameter") from None
    if cls is NormalError:
        try:
            return cls(kwargs.pop("sigma"))
        except KeyError:
            raise ValueError("normal needs a sigma parameter") from None
    if kwargs:
        raise ValueError(f"{family} takes no parameters")
    return cls()


def preset_model(family, noise_std):
    """Model of the given family with standard deviation ``noise_std``.

    Matches error strengths across families so that simulation scenarios
    share a common noise-to-signal ratio.  Gamma presets use shape 2.
    """
    if family == "normal":
        return NormalError(noise_std)
    if family == "laplace":
        return LaplaceError(noise_std / math.sqrt(2.0))
    if family == "gamma":
        return GammaError(2.0, noise_std / math.sqrt(2.0))
    if family == "gamma0":
        return CenteredGammaError(2.0, noise_std / math.sqrt(2.0))
    if family == "identity":
        return NoError()
    raise ValueError(f"unknown error family {family!r}")
