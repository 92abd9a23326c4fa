"""Receive combiners: the SVD analog combiner, its unit-modulus split with
digital compensation, and the per-path equalizer that enforces K = I."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .precoding import alternating_factorize


class SingularPathError(ValueError):
    """Raised when a retained path cannot support a stream (sigma_i ~ 0 or alpha_i = 0)."""


@dataclass(frozen=True)
class HybridCombiner:
    """Analog combiner W_A (target, equal to U) with an optional constrained
    split U ~ W_A_tilde @ W_D where W_A_tilde has entries of modulus
    1/sqrt(N_r) and W_D is the N_rs x N_s digital compensation factor."""

    W_A: np.ndarray
    mode: str = "unconstrained"
    W_A_tilde: np.ndarray | None = None
    W_D: np.ndarray | None = None
    residual: float = 0.0
    initial_residual: float = 0.0

    @property
    def num_rf_paths(self) -> int:
        if self.mode == "constrained":
            return self.W_A_tilde.shape[1]
        return self.W_A.shape[1]

    def effective_analog(self) -> np.ndarray:
        """The matrix standing in for U in the combining chain: U itself in
        unconstrained mode, the compensated product W_A_tilde @ W_D otherwise."""
        if self.mode == "constrained":
            return self.W_A_tilde @ self.W_D
        return self.W_A


@dataclass(frozen=True)
class EqualizedReceiver:
    """Receiver with the digital equalizer applied on top of the combiner.

    ``W_D_eq`` is N_rs x N_s and is applied as W_D_eq^H to the quantizer
    output; ``K`` is the explicit end-to-end signal matrix
    W_D_eq^H W_alpha A^H U diag(sigma), equal to I in unconstrained mode.
    """

    combiner: HybridCombiner
    W_alpha: np.ndarray
    W_D_eq: np.ndarray
    K: np.ndarray

    def digital_combiner(self) -> np.ndarray:
        """The N_s x N_rs matrix actually applied to the quantized vector."""
        return self.W_D_eq.conj().T


def design_unconstrained_combiner(channel: ChannelRealization) -> HybridCombiner:
    """W_A = U: the retained left singular vectors."""
    return HybridCombiner(W_A=channel.U, mode="unconstrained")


def split_constrained(
    combiner: HybridCombiner, max_iters: int = 200, tol: float = 1e-12
) -> HybridCombiner:
    """Split W_A = U into a unit-modulus analog part and a digital
    compensation factor by the same alternating scheme used for precoding.

    The compensation residual ||U - W_A_tilde @ W_D||_F is recorded; the
    accepted iterates never increase it.
    """
    U = combiner.W_A
    n_r, n_s = U.shape
    scale = 1.0 / np.sqrt(n_r)
    w_tilde, w_d, history = alternating_factorize(U, n_s, scale, max_iters, tol)
    return HybridCombiner(
        W_A=U,
        mode="constrained",
        W_A_tilde=w_tilde,
        W_D=w_d,
        residual=history[-1],
        initial_residual=history[0],
    )


def equalize(
    combiner: HybridCombiner,
    sigma: np.ndarray,
    w_alpha: np.ndarray,
    sigma_tol_factor: float = 1e-12,
) -> EqualizedReceiver:
    """Build the digital equalizer W_D_eq^H = (W_alpha diag(sigma))^-1.

    With the unconstrained combiner this makes K = I exactly; K is computed
    explicitly either way so the identity can be verified rather than
    assumed.  Raises :class:`SingularPathError` when any retained sigma_i
    falls below ``sigma_tol_factor * sigma_1`` or any alpha_i is zero.
    """
    sigma = np.asarray(sigma, dtype=float)
    w_alpha = np.asarray(w_alpha, dtype=float)
    if sigma.size == 0:
        raise ValueError("empty spectrum")
    sigma_tol = sigma_tol_factor * sigma[0]
    if np.any(sigma <= sigma_tol):
        raise SingularPathError(
            f"channel cannot support {sigma.size} streams: min sigma "
            f"{sigma.min():.3e} <= tolerance {sigma_tol:.3e}"
        )
    if np.any(w_alpha <= 0):
        raise SingularPathError("zero quantizer gain alpha on a retained path")

    diag_eq = 1.0 / (w_alpha * sigma)
    w_d_eq = np.diag(diag_eq).astype(complex)

    analog = combiner.effective_analog()
    # K = W_D_eq^H W_alpha A^H U diag(sigma)
    K = (w_d_eq.conj().T * w_alpha) @ analog.conj().T @ (combiner.W_A * sigma)
    return EqualizedReceiver(combiner=combiner, W_alpha=w_alpha, W_D_eq=w_d_eq, K=K)
