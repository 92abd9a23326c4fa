"""Synthetic clustered mmWave MIMO channels and their truncated SVD.

The generator is a Saleh-Valenzuela-style geometric model: a sum of
clusters x rays of complex-Gaussian path gains times ULA steering vector
outer products, Frobenius-normalized so E[||H||_F^2] = N_t * N_r.  A strong
scatterer is emulated by boosting the dominant singular value in the
spectral domain and reassembling H from the modified spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Intra-cluster angular spread of the ray offsets, radians (std of the
# Gaussian perturbation around each cluster center).
RAY_ANGLE_SPREAD = 0.1


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear arrays at both link ends.

    Parameters
    ----------
    num_tx_antennas, num_rx_antennas : int
        Element counts N_t, N_r.
    element_spacing : float
        Spacing in wavelengths, default half-wavelength.
    """

    num_tx_antennas: int
    num_rx_antennas: int
    element_spacing: float = 0.5

    def __post_init__(self):
        if self.num_tx_antennas < 1 or self.num_rx_antennas < 1:
            raise ValueError("antenna counts must be >= 1")
        if not (self.element_spacing > 0 and np.isfinite(self.element_spacing)):
            raise ValueError("element_spacing must be positive and finite")


@dataclass(frozen=True)
class ChannelConfig:
    """Configuration of one synthetic channel draw."""

    geometry: ArrayGeometry
    num_streams: int
    num_clusters: int = 8
    num_rays_per_cluster: int = 10
    dominant_boost_factor: float = 3.0
    rng_seed: int = 0

    def __post_init__(self):
        n_min = min(self.geometry.num_tx_antennas, self.geometry.num_rx_antennas)
        if not (1 <= self.num_streams <= n_min):
            raise ValueError(
                f"num_streams: must be in [1, {n_min}] for a "
                f"{self.geometry.num_rx_antennas}x{self.geometry.num_tx_antennas} channel"
            )
        if self.num_clusters < 1 or self.num_rays_per_cluster < 1:
            raise ValueError("num_clusters and num_rays_per_cluster must be >= 1")
        if not (self.dominant_boost_factor >= 1 and np.isfinite(self.dominant_boost_factor)):
            raise ValueError("dominant_boost_factor must be finite and >= 1")


@dataclass(frozen=True)
class ChannelRealization:
    """A channel matrix together with its rank-N_s truncated SVD factors.

    ``H`` is N_r x N_t; ``U`` (N_r x N_s) and ``F_opt`` (N_t x N_s) hold the
    dominant left/right singular vectors and ``sigma`` the corresponding
    singular values, sorted non-increasing.
    """

    H: np.ndarray
    U: np.ndarray
    sigma: np.ndarray
    F_opt: np.ndarray

    @property
    def num_streams(self) -> int:
        return self.sigma.shape[0]

    @property
    def num_rx_antennas(self) -> int:
        return self.H.shape[0]

    @property
    def num_tx_antennas(self) -> int:
        return self.H.shape[1]

    def truncation_residual(self) -> float:
        """Relative Frobenius residual ||H - U diag(sigma) F_opt^H|| / ||H||."""
        approx = (self.U * self.sigma) @ self.F_opt.conj().T
        denom = np.linalg.norm(self.H)
        if denom == 0:
            return 0.0
        return float(np.linalg.norm(self.H - approx) / denom)


def steering_vector(num_elements: int, spacing: float, angle: float) -> np.ndarray:
    """Unit-norm ULA response: entry k is exp(i 2 pi spacing k sin(angle)) / sqrt(N)."""
    if num_elements < 1:
        raise ValueError("num_elements must be >= 1")
    k = np.arange(num_elements)
    return np.exp(2j * np.pi * spacing * k * np.sin(angle)) / np.sqrt(num_elements)


def generate_channel(config: ChannelConfig) -> ChannelRealization:
    """Draw one clustered channel realization, deterministic in ``config.rng_seed``.

    Cluster center angles are uniform on [-pi/2, pi/2] at both ends; rays
    scatter around the centers with ``RAY_ANGLE_SPREAD``; ray gains are unit
    variance circular Gaussian.  After normalization the largest singular
    value is multiplied by ``dominant_boost_factor`` and H is reassembled
    from the modified spectrum, leaving all other singular values and the
    singular vectors untouched.
    """
    geom = config.geometry
    n_t, n_r = geom.num_tx_antennas, geom.num_rx_antennas
    rng = np.random.default_rng(config.rng_seed)

    num_paths = config.num_clusters * config.num_rays_per_cluster
    H = np.zeros((n_r, n_t), dtype=complex)
    for _ in range(config.num_clusters):
        aoa_center = rng.uniform(-np.pi / 2, np.pi / 2)
        aod_center = rng.uniform(-np.pi / 2, np.pi / 2)
        for _ in range(config.num_rays_per_cluster):
            aoa = aoa_center + RAY_ANGLE_SPREAD * rng.standard_normal()
            aod = aod_center + RAY_ANGLE_SPREAD * rng.standard_normal()
            gain = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
            a_rx = steering_vector(n_r, geom.element_spacing, aoa)
            a_tx = steering_vector(n_t, geom.element_spacing, aod)
            H += gain * np.outer(a_rx, a_tx.conj())
    H *= np.sqrt(n_t * n_r / num_paths)

    u_full, s_full, vh_full = np.linalg.svd(H, full_matrices=False)
    s_full = s_full.copy()
    s_full[0] *= config.dominant_boost_factor
    H = (u_full * s_full) @ vh_full

    n_s = config.num_streams
    return ChannelRealization(
        H=H,
        U=u_full[:, :n_s],
        sigma=s_full[:n_s],
        F_opt=vh_full[:n_s].conj().T,
    )


def channel_from_spectrum(
    singular_values, geometry: ArrayGeometry, rng_seed: int
) -> ChannelRealization:
    """Build H = U diag(s) V^H with prescribed singular values and random
    unitary-column factors (Haar-distributed, deterministic in the seed).

    The input must be non-negative and sorted non-increasing; the returned
    ``sigma`` equals the input exactly.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("singular_values must be a non-empty 1-D sequence")
    if np.any(s < 0):
        raise ValueError("singular_values must be non-negative")
    if np.any(np.diff(s) > 0):
        raise ValueError("singular_values must be sorted non-increasing")
    n_s = s.size
    n_t, n_r = geometry.num_tx_antennas, geometry.num_rx_antennas
    if n_s > min(n_t, n_r):
        raise ValueError("more singular values than min(N_t, N_r)")

    rng = np.random.default_rng(rng_seed)
    U = _haar_columns(rng, n_r, n_s)
    V = _haar_columns(rng, n_t, n_s)
    H = (U * s) @ V.conj().T
    return ChannelRealization(H=H, U=U, sigma=s, F_opt=V)


def _haar_columns(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k orthonormal columns of a Haar-random n x n unitary."""
    z = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d)).conj()
