"""Fisher-Snedecor F composite fading channel model.

The instantaneous SNR of the channel follows a scaled F law with multipath
shape m and shadowing shape m_s (valid for m_s > 1), equivalently the ratio
of two gamma variates. This module holds the parameter container, the SNR
and envelope densities, sampling, and the Nakagami/Rayleigh limiting law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_fn import ln_beta, ln_gamma

__all__ = [
    "FadingParams",
    "db_to_linear",
    "linear_to_db",
    "snr_pdf",
    "envelope_pdf",
    "sample_snr",
    "nakagami_snr_pdf",
]


def db_to_linear(value_db: float) -> float:
    """dB to linear power ratio."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Linear power ratio to dB."""
    if not value > 0.0:
        raise ValueError("dB conversion requires a positive value")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class FadingParams:
    """F composite fading channel parameters.

    m fades the multipath severity, m_s the shadowing (both dimensionless
    shapes), mean_snr is the average linear SNR. omega is the mean envelope
    power, used only by the envelope-domain density.
    """

    m: float
    m_s: float
    mean_snr: float
    omega: float = 1.0

    def __post_init__(self):
        if not self.m > 0.0:
            raise ValueError("m must be positive")
        if not self.m_s > 1.0:
            # the (m_s - 1) mean normalization degenerates at m_s = 1
            raise ValueError("m_s must exceed 1")
        if not self.mean_snr > 0.0:
            raise ValueError("mean_snr must be positive")
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")

    @classmethod
    def from_db(cls, m: float, m_s: float, mean_snr_db: float, omega: float = 1.0) -> "FadingParams":
        return cls(m, m_s, db_to_linear(mean_snr_db), omega)

    @property
    def mean_snr_db(self) -> float:
        return linear_to_db(self.mean_snr)

    @property
    def snr_scale(self) -> float:
        """Scale c of the underlying F law: gamma = c * X/Y with unit-scale
        gamma variates X ~ (shape m), Y ~ (shape m_s)."""
        return (self.m_s - 1.0) * self.mean_snr / self.m


def snr_pdf(p: FadingParams, gamma):
    """SNR density of the F composite channel.

    f(gamma) = m^m (m_s-1)^{m_s} mean^{m_s} gamma^{m-1}
               / (B(m, m_s) [m gamma + (m_s-1) mean]^{m+m_s}),
    evaluated in log space. Accepts scalar or array gamma >= 0.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("snr_pdf requires gamma >= 0")
    m, ms, gbar = p.m, p.m_s, p.mean_snr
    ln_norm = (
        m * math.log(m)
        + ms * math.log(ms - 1.0)
        + ms * math.log(gbar)
        - ln_beta(m, ms)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        # (m-1) * ln(0) is nan when m == 1; the branch below overwrites it
        ln_g = np.where(g > 0.0, np.log(g), -np.inf)
        ln_f = ln_norm + (m - 1.0) * ln_g - (m + ms) * np.log(m * g + (ms - 1.0) * gbar)
    out = np.exp(ln_f)
    if m == 1.0:
        # gamma^{m-1} is identically 1; the g=0 value is finite
        out = np.where(g == 0.0, math.exp(ln_norm - (m + ms) * math.log((ms - 1.0) * gbar)), out)
    elif m < 1.0:
        out = np.where(g == 0.0, np.inf, out)
    return out if out.ndim else float(out)


def envelope_pdf(p: FadingParams, r):
    """Envelope (amplitude) density of the F composite channel.

    f(r) = 2 m^m (m_s-1)^{m_s} Omega^{m_s} r^{2m-1}
           / (B(m, m_s) [m r^2 + (m_s-1) Omega]^{m+m_s}).
    """
    rv = np.asarray(r, dtype=float)
    if np.any(rv < 0.0):
        raise ValueError("envelope_pdf requires r >= 0")
    m, ms, om = p.m, p.m_s, p.omega
    ln_norm = (
        math.log(2.0)
        + m * math.log(m)
        + ms * math.log(ms - 1.0)
        + ms * math.log(om)
        - ln_beta(m, ms)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ln_r = np.where(rv > 0.0, np.log(rv), -np.inf)
        ln_f = ln_norm + (2.0 * m - 1.0) * ln_r - (m + ms) * np.log(m * rv * rv + (ms - 1.0) * om)
    out = np.exp(ln_f)
    if m == 0.5:
        out = np.where(rv == 0.0, math.exp(ln_norm - (m + ms) * math.log((ms - 1.0) * om)), out)
    elif m < 0.5:
        out = np.where(rv == 0.0, np.inf, out)
    return out if out.ndim else float(out)


def sample_snr(p: FadingParams, rng: np.random.Generator, size=None):
    """Draw instantaneous SNR values: gamma = c X / Y with X ~ Gamma(m),
    Y ~ Gamma(m_s), c = (m_s-1) mean / m.

    numpy's Generator.gamma implements the Marsaglia-Tsang rejection
    sampler (with the power boost below shape 1), which is exactly the
    scheme this model calls for. Returns a scalar when size is None.
    """
    x = rng.gamma(p.m, 1.0, size=size)
    y = rng.gamma(p.m_s, 1.0, size=size)
    out = p.snr_scale * x / y
    return float(out) if size is None else out


def nakagami_snr_pdf(m_hat: float, mean_snr: float, gamma):
    """SNR density under Nakagami-m fading: a gamma law with shape m_hat
    and mean mean_snr. m_hat = 1 is the Rayleigh (exponential) case."""
    if not m_hat > 0.0:
        raise ValueError("nakagami_snr_pdf requires m_hat > 0")
    if not mean_snr > 0.0:
        raise ValueError("nakagami_snr_pdf requires mean_snr > 0")
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("nakagami_snr_pdf requires gamma >= 0")
    ln_norm = m_hat * math.log(m_hat / mean_snr) - ln_gamma(m_hat)
    with np.errstate(divide="ignore", invalid="ignore"):
        ln_g = np.where(g > 0.0, np.log(g), -np.inf)
        ln_f = ln_norm + (m_hat - 1.0) * ln_g - m_hat * g / mean_snr
    out = np.exp(ln_f)
    if m_hat == 1.0:
        out = np.where(g == 0.0, 1.0 / mean_snr, out)
    elif m_hat < 1.0:
        out = np.where(g == 0.0, np.inf, out)
    return out if out.ndim else float(out)
