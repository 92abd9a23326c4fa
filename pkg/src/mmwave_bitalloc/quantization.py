"""Variable-resolution ADC modeling.

Covers the fixed normalized-distortion table f(b), Lloyd-Max scalar
quantizers trained on the unit Gaussian with analytic cell moments, the
additive-quantization-noise linearization Q(z) = W_alpha z + n_q, and the
exponential ADC power model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType

import numpy as np
from scipy.special import erf, erfinv

from .channel import ChannelRealization
from .combining import HybridCombiner

_SQRT2 = np.sqrt(2.0)
_SQRT_2PI = np.sqrt(2.0 * np.pi)

# Normalized mean-square quantization error of a b-bit Gaussian MMSE
# quantizer.  Hard constants, not configuration.
_F_VALUES = MappingProxyType(
    {1: 0.3634, 2: 0.1175, 3: 0.03454, 4: 0.009497, 5: 0.002499}
)


@dataclass(frozen=True)
class DistortionTable:
    """Map from ADC bits b to the normalized distortion f(b) in (0, 1)."""

    values: MappingProxyType = _F_VALUES

    def __post_init__(self):
        bits = sorted(self.values)
        f = [self.values[b] for b in bits]
        if any(not (0.0 < v < 1.0) for v in f):
            raise ValueError("distortion values must lie in (0, 1)")
        if any(f[i + 1] >= f[i] for i in range(len(f) - 1)):
            raise ValueError("distortion must be strictly decreasing in bits")

    def factor(self, bits: int) -> float:
        try:
            return self.values[int(bits)]
        except KeyError:
            raise KeyError(f"no distortion entry for {bits}-bit ADC") from None

    def gain_ratio(self, bits: int) -> float:
        """f(b) / (1 - f(b)), the quantization term of the per-path MSE."""
        f = self.factor(bits)
        return f / (1.0 - f)

    def dump_text(self) -> str:
        lines = ["bits  f(bits)"]
        for b in sorted(self.values):
            lines.append(f"{b:4d}  {self.values[b]:.6g}")
        return "\n".join(lines) + "\n"


DEFAULT_DISTORTION = DistortionTable()


@dataclass(frozen=True)
class BitAllocation:
    """Integer ADC resolutions per RF path with the associated power cost
    cost_scale * sum(2**b_i)."""

    bits: tuple
    cost_scale: float = 1.0
    b_min: int = 1
    b_max: int = 4
    power_cost: float = field(init=False)

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) == 0:
            raise ValueError("empty bit allocation")
        if any(b < self.b_min or b > self.b_max for b in bits):
            raise ValueError(
                f"bit allocation {bits} outside [{self.b_min}, {self.b_max}]"
            )
        object.__setattr__(self, "bits", bits)
        object.__setattr__(
            self, "power_cost", self.cost_scale * float(sum(2**b for b in bits))
        )

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.int64)


@dataclass(frozen=True)
class AqnmModel:
    """Linearized quantizer for one (channel, combiner, allocation) triple:
    Q(z) = diag(w_alpha) z + n_q with E[n_q n_q^H] = diag(d_q_sq)."""

    w_alpha: np.ndarray
    d_q_sq: np.ndarray
    allocation: BitAllocation | None


@dataclass(frozen=True)
class ScalarQuantizer:
    """Trained Lloyd-Max quantizer for a unit-variance Gaussian source."""

    bits: int
    levels: np.ndarray
    thresholds: np.ndarray
    distortion: float
    trained_variance: float = 1.0

    def quantize(self, x: np.ndarray) -> np.ndarray:
        return self.levels[np.digitize(x, self.thresholds)]

    def dump_text(self) -> str:
        lines = [f"bits {self.bits}", f"distortion {self.distortion:.8g}"]
        lines.append("levels " + " ".join(f"{v:.8g}" for v in self.levels))
        lines.append("thresholds " + " ".join(f"{v:.8g}" for v in self.thresholds))
        return "\n".join(lines) + "\n"


def _normal_cdf(x):
    return 0.5 * (1.0 + erf(x / _SQRT2))


def _normal_pdf(x):
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def _cell_moments(lo, hi):
    """Integrals of (1, x, x^2) * pdf over [lo, hi] for the unit Gaussian."""
    m0 = _normal_cdf(hi) - _normal_cdf(lo)
    m1 = _normal_pdf(lo) - _normal_pdf(hi)
    lo_term = np.where(np.isfinite(lo), lo, 0.0) * _normal_pdf(lo)
    hi_term = np.where(np.isfinite(hi), hi, 0.0) * _normal_pdf(hi)
    m2 = m0 + lo_term - hi_term
    return m0, m1, m2


def train_lloyd_max(bits: int, tol: float = 1e-10, max_iters: int = 20000) -> ScalarQuantizer:
    """Train a 2**bits-level MMSE quantizer for the unit Gaussian.

    Pure Lloyd iteration with closed-form (erf-based) Gaussian cell moments:
    levels move to cell centroids, thresholds to level midpoints, until the
    largest level movement drops below ``tol``.  Deterministic; no sampling.
    """
    if not (1 <= int(bits) <= 8):
        raise ValueError("bits must be in [1, 8]")
    bits = int(bits)
    num_levels = 2**bits
    probs = (np.arange(num_levels) + 0.5) / num_levels
    levels = _SQRT2 * erfinv(2.0 * probs - 1.0)

    for _ in range(max_iters):
        thresholds = 0.5 * (levels[:-1] + levels[1:])
        lo = np.concatenate(([-np.inf], thresholds))
        hi = np.concatenate((thresholds, [np.inf]))
        m0, m1, _ = _cell_moments(lo, hi)
        new_levels = m1 / m0
        movement = np.max(np.abs(new_levels - levels))
        levels = new_levels
        if movement < tol:
            break

    thresholds = 0.5 * (levels[:-1] + levels[1:])
    lo = np.concatenate(([-np.inf], thresholds))
    hi = np.concatenate((thresholds, [np.inf]))
    m0, m1, m2 = _cell_moments(lo, hi)
    distortion = float(np.sum(m2 - 2.0 * levels * m1 + levels**2 * m0))
    return ScalarQuantizer(
        bits=bits, levels=levels, thresholds=thresholds, distortion=distortion
    )


@lru_cache(maxsize=None)
def trained_quantizer(bits: int) -> ScalarQuantizer:
    """Cached :func:`train_lloyd_max` with default settings."""
    return train_lloyd_max(bits)


def quantize_vector(quantizers, z: np.ndarray, scales) -> np.ndarray:
    """Quantize a complex vector path by path.

    Real and imaginary parts of z[i] are quantized independently by
    ``quantizers[i]`` after normalization by ``scales[i]``, the per-real-
    component standard deviation known to the caller from model statistics.
    ``z`` may be a vector (paths,) or a block (paths, n).
    """
    z = np.asarray(z, dtype=complex)
    scales = np.asarray(scales, dtype=float)
    if len(quantizers) != z.shape[0] or scales.shape[0] != z.shape[0]:
        raise ValueError("quantizers, z and scales must agree on the path count")
    out = np.empty_like(z)
    for i, q in enumerate(quantizers):
        s = scales[i]
        out[i] = s * (q.quantize(z[i].real / s) + 1j * q.quantize(z[i].imag / s))
    return out


def build_aqnm(
    channel: ChannelRealization,
    combiner: HybridCombiner,
    allocation: BitAllocation | None,
    table: DistortionTable = DEFAULT_DISTORTION,
    signal_power: float = 1.0,
) -> AqnmModel:
    """Linearize the per-path quantizers against this channel and combiner.

    alpha_i = 1 - f(b_i) and the quantization-noise variance along path i is
    alpha_i (1 - alpha_i) (p * [A^H H H^H A]_ii + 1) with A the effective
    analog combiner.  ``allocation=None`` models ideal (unquantized) ADCs.
    """
    analog = combiner.effective_analog()
    n_paths = analog.shape[1]
    if allocation is None:
        return AqnmModel(
            w_alpha=np.ones(n_paths), d_q_sq=np.zeros(n_paths), allocation=None
        )
    if len(allocation) != n_paths:
        raise ValueError(
            f"allocation has {len(allocation)} entries for {n_paths} RF paths"
        )
    f = np.array([table.factor(b) for b in allocation.bits])
    alpha = 1.0 - f
    rows = analog.conj().T @ channel.H
    path_power = np.sum(np.abs(rows) ** 2, axis=1)
    d_q_sq = alpha * (1.0 - alpha) * (signal_power * path_power + 1.0)
    return AqnmModel(w_alpha=alpha, d_q_sq=d_q_sq, allocation=allocation)


def adc_power(allocation, energy_per_step: float = 1.0, sampling_rate: float = 1.0) -> float:
    """Total ADC power c * f_s * sum(2**b_i)."""
    bits = allocation.bits if isinstance(allocation, BitAllocation) else allocation
    return energy_per_step * sampling_rate * float(sum(2 ** int(b) for b in bits))
