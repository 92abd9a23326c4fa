"""Receiver error metrics: analytic MSE, the estimation-error lower bound
computed from the general linear-model form, and end-to-end Monte Carlo."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .combining import EqualizedReceiver, design_unconstrained_combiner, equalize
from .precoding import HybridPrecoder, effective_transmit_matrix
from .quantization import (
    AqnmModel,
    BitAllocation,
    build_aqnm,
    quantize_vector,
    trained_quantizer,
)

_QAM64_PAM = np.arange(-7, 8, 2, dtype=float)
_QAM64_PAM = _QAM64_PAM / np.sqrt(np.mean(_QAM64_PAM**2) * 2.0)


@dataclass(frozen=True)
class NoiseModel:
    """Thermal noise at the receive antennas, n ~ CN(0, sigma_n^2 I).

    Under the unit-stream-power convention the link SNR in dB is
    10 log10(p / sigma_n^2).
    """

    sigma_n_sq: float
    snr_db: float

    def __post_init__(self):
        if not (self.sigma_n_sq > 0 and np.isfinite(self.sigma_n_sq)):
            raise ValueError("sigma_n_sq must be positive and finite")

    @classmethod
    def from_snr_db(cls, snr_db: float, signal_power: float = 1.0) -> "NoiseModel":
        return cls(sigma_n_sq=signal_power * 10.0 ** (-snr_db / 10.0), snr_db=snr_db)

    @classmethod
    def from_sigma_n_sq(cls, sigma_n_sq: float, signal_power: float = 1.0) -> "NoiseModel":
        return cls(
            sigma_n_sq=sigma_n_sq,
            snr_db=10.0 * np.log10(signal_power / sigma_n_sq),
        )


@dataclass
class MseReport:
    mse_matrix: np.ndarray | None = None
    trace_mse: float | None = None
    crlb_matrix: np.ndarray | None = None
    mc_trace_mse: float | None = None
    mc_samples: int = 0
    mc_std_err: float | None = None


def _chain_matrices(equalized: EqualizedReceiver):
    analog = equalized.combiner.effective_analog()
    digital = equalized.digital_combiner()
    return analog, digital


def analytic_mse(
    channel: ChannelRealization,
    equalized: EqualizedReceiver,
    aqnm: AqnmModel,
    noise: NoiseModel,
    signal_power: float = 1.0,
) -> MseReport:
    """Error covariance of the combined output, general form:

        MSE = p (K - I)(K - I)^H + sigma_n^2 G G^H + D diag(d_q^2) D^H

    with G = D W_alpha A^H and D the applied digital combiner.  When K = I
    this reduces to the closed form sigma_n^2 Sigma^-2 + W_D^H D_q^2 W_D.
    """
    analog, digital = _chain_matrices(equalized)
    n_s = equalized.K.shape[0]
    K_err = equalized.K - np.eye(n_s)
    G = (digital * equalized.W_alpha) @ analog.conj().T
    mse = (
        signal_power * (K_err @ K_err.conj().T)
        + noise.sigma_n_sq * (G @ G.conj().T)
        + (digital * aqnm.d_q_sq) @ digital.conj().T
    )
    return MseReport(mse_matrix=mse, trace_mse=float(np.real(np.trace(mse))))


def mse_closed_form(
    channel: ChannelRealization,
    equalized: EqualizedReceiver,
    aqnm: AqnmModel,
    noise: NoiseModel,
) -> np.ndarray:
    """The K = I closed form sigma_n^2 Sigma^-2 + W_D^H D_q^2 W_D."""
    digital = equalized.digital_combiner()
    return noise.sigma_n_sq * np.diag(channel.sigma**-2.0).astype(complex) + (
        digital * aqnm.d_q_sq
    ) @ digital.conj().T


def crlb(
    channel: ChannelRealization,
    equalized: EqualizedReceiver,
    aqnm: AqnmModel,
    noise: NoiseModel,
) -> np.ndarray:
    """Estimation-error lower bound (K^H C^-1 K)^-1 for the linear chain
    y = K x + n1 with C = cov(n1), computed from the general form rather
    than any simplified identity."""
    analog, digital = _chain_matrices(equalized)
    G = (digital * equalized.W_alpha) @ analog.conj().T
    C = noise.sigma_n_sq * (G @ G.conj().T) + (digital * aqnm.d_q_sq) @ digital.conj().T
    if not np.any(aqnm.d_q_sq) and noise.sigma_n_sq == 0:
        raise ValueError("noise covariance is singular: no thermal or quantization noise")
    K = equalized.K
    fisher = K.conj().T @ np.linalg.solve(C, K)
    return np.linalg.solve(fisher, np.eye(fisher.shape[0], dtype=complex))


def _draw_symbols(rng, n_streams, n, source):
    if source == "gaussian":
        return (
            rng.standard_normal((n_streams, n)) + 1j * rng.standard_normal((n_streams, n))
        ) / np.sqrt(2.0)
    if source == "qam64":
        re = rng.choice(_QAM64_PAM, size=(n_streams, n))
        im = rng.choice(_QAM64_PAM, size=(n_streams, n))
        return re + 1j * im
    raise ValueError(f"unknown symbol source {source!r}")


def simulate_mc(
    channel: ChannelRealization,
    equalized: EqualizedReceiver,
    aqnm: AqnmModel,
    noise: NoiseModel,
    num_symbols: int,
    rng_seed: int,
    quantizer_mode: str = "aqnm-linear",
    precoder: HybridPrecoder | None = None,
    symbol_source: str = "gaussian",
    signal_power: float = 1.0,
    stream_key: tuple = (),
    block_size: int = 8192,
) -> MseReport:
    """End-to-end Monte Carlo of the combined receiver.

    Symbols pass through the precoded channel, pick up thermal noise, are
    analog-combined, quantized (either the linear surrogate alpha z + n_q
    with n_q ~ CN(0, D_q^2), or trained Lloyd-Max quantizers scaled to the
    per-path model standard deviation) and digitally combined.  The sample
    mean of ||y - x||^2 and its standard error are reported.

    Work is split into fixed-size blocks, each with a counter-derived RNG
    stream, and merged in block order, so the result depends only on
    (rng_seed, stream_key).
    """
    if num_symbols < 1:
        raise ValueError("num_symbols must be >= 1")
    if quantizer_mode not in ("aqnm-linear", "lloyd-max"):
        raise ValueError(f"unknown quantizer_mode {quantizer_mode!r}")

    transmit = effective_transmit_matrix(channel, precoder)
    analog, digital = _chain_matrices(equalized)
    alpha = equalized.W_alpha
    n_r = channel.num_rx_antennas
    n_s = transmit.shape[1]
    noise_scale = np.sqrt(noise.sigma_n_sq / 2.0)

    lloyd = quantizer_mode == "lloyd-max" and aqnm.allocation is not None
    if lloyd:
        quantizers = [trained_quantizer(b) for b in aqnm.allocation.bits]
        signal_part = analog.conj().T @ transmit
        col_norm_sq = np.sum(np.abs(analog) ** 2, axis=0)
        path_var = (
            signal_power * np.sum(np.abs(signal_part) ** 2, axis=1)
            + noise.sigma_n_sq * col_norm_sq
        )
        scales = np.sqrt(path_var / 2.0)

    total = 0.0
    total_sq = 0.0
    done = 0
    block = 0
    while done < num_symbols:
        m = min(block_size, num_symbols - done)
        rng = np.random.default_rng(
            np.random.SeedSequence(rng_seed, spawn_key=(*stream_key, block))
        )
        x = np.sqrt(signal_power) * _draw_symbols(rng, n_s, m, symbol_source)
        n = noise_scale * (
            rng.standard_normal((n_r, m)) + 1j * rng.standard_normal((n_r, m))
        )
        z = analog.conj().T @ (transmit @ x + n)
        if lloyd:
            z_q = quantize_vector(quantizers, z, scales)
        elif aqnm.allocation is not None and quantizer_mode == "aqnm-linear":
            nq_scale = np.sqrt(aqnm.d_q_sq / 2.0)[:, None]
            n_q = nq_scale * (
                rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape)
            )
            z_q = alpha[:, None] * z + n_q
        else:
            z_q = z
        y = digital @ z_q
        err = np.sum(np.abs(y - x) ** 2, axis=0)
        total += float(err.sum())
        total_sq += float((err**2).sum())
        done += m
        block += 1

    mean = total / num_symbols
    var = max(total_sq / num_symbols - mean**2, 0.0)
    return MseReport(
        mc_trace_mse=mean,
        mc_samples=num_symbols,
        mc_std_err=float(np.sqrt(var / num_symbols)),
    )


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    policy: str
    bits: tuple | None
    delta_analytic: float
    delta_mc: float | None = None
    std_err: float | None = None
    evaluations: int | None = None


FIXED_POLICIES = ("all-1-bit", "all-2-bit", "no-quantization")
SEARCH_POLICIES = ("fs", "ga", "crlb")


def resolve_policy_allocation(
    policy: str,
    channel: ChannelRealization,
    combiner,
    noise: NoiseModel,
    space=None,
    ga_params=None,
    signal_power: float = 1.0,
):
    """Return (BitAllocation | None, evaluations | None) for a policy name."""
    from . import bitalloc as _ba

    name = policy.lower()
    n_s = channel.num_streams
    if name == "all-1-bit":
        return BitAllocation((1,) * n_s), None
    if name == "all-2-bit":
        return BitAllocation((2,) * n_s), None
    if name == "no-quantization":
        return None, None
    if space is None:
        raise ValueError(f"policy {policy!r} needs a search space")
    if name == "fs":
        res = _ba.allocate_full_search(
            space, channel, combiner, noise, signal_power=signal_power
        )
    elif name == "crlb":
        table = _ba.gain_table(
            channel, combiner, noise, space.b_min, space.b_max,
            signal_power=signal_power,
        )
        res = _ba.allocate_crlb(
            space, table,
            num_tx=channel.num_tx_antennas, num_rx=channel.num_rx_antennas,
        )
    elif name == "ga":
        params = ga_params if ga_params is not None else _ba.ga_preset(n_s)
        objective = _ba.trace_mse_objective(
            channel, combiner, noise, space.b_min, space.b_max,
            signal_power=signal_power,
        )
        res = _ba.allocate_ga(
            space, objective, params,
            num_tx=channel.num_tx_antennas, num_rx=channel.num_rx_antennas,
        )
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return res.allocation, res.evaluations


def snr_sweep(
    channel: ChannelRealization,
    policy: str,
    snr_grid_db,
    b_min: int = 1,
    b_max: int = 4,
    power_budget: float | None = None,
    mc_num_symbols: int = 0,
    mc_seed: int = 0,
    quantizer_mode: str = "aqnm-linear",
    ga_params=None,
    signal_power: float = 1.0,
) -> list[SweepRow]:
    """Analytic (and optionally Monte Carlo) trace MSE across an SNR grid
    for one allocation policy.  Deterministic given the seeds."""
    from . import bitalloc as _ba

    snr_grid_db = list(snr_grid_db)
    if not snr_grid_db:
        raise ValueError("empty SNR grid")
    combiner = design_unconstrained_combiner(channel)
    space = None
    if policy.lower() in SEARCH_POLICIES:
        space = _ba.enumerate_bset(
            channel.num_streams, b_min=b_min, b_max=b_max, power_budget=power_budget
        )

    rows = []
    for idx, snr_db in enumerate(snr_grid_db):
        noise = NoiseModel.from_snr_db(snr_db, signal_power)
        allocation, evaluations = resolve_policy_allocation(
            policy, channel, combiner, noise, space, ga_params, signal_power
        )
        aqnm = build_aqnm(channel, combiner, allocation, signal_power=signal_power)
        equalized = equalize(combiner, channel.sigma, aqnm.w_alpha)
        report = analytic_mse(channel, equalized, aqnm, noise, signal_power)
        delta_mc = std_err = None
        if mc_num_symbols > 0:
            mc = simulate_mc(
                channel,
                equalized,
                aqnm,
                noise,
                num_symbols=mc_num_symbols,
                rng_seed=mc_seed,
                quantizer_mode=quantizer_mode,
                signal_power=signal_power,
                stream_key=(idx,),
            )
            delta_mc, std_err = mc.mc_trace_mse, mc.mc_std_err
        rows.append(
            SweepRow(
                snr_db=float(snr_db),
                policy=policy.lower(),
                bits=None if allocation is None else allocation.bits,
                delta_analytic=report.trace_mse,
                delta_mc=delta_mc,
                std_err=std_err,
                evaluations=evaluations,
            )
        )
    return rows
