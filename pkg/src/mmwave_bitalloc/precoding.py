"""Transmit precoding: the unconstrained SVD precoder and its hybrid
factorization into a unit-modulus analog part times a small digital part."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization


@dataclass(frozen=True)
class HybridPrecoder:
    """Feasible factorization F_opt ~ F_A @ F_D.

    F_A is N_t x N_rt with every entry of modulus 1/sqrt(N_t); F_D is
    N_rt x N_s, rescaled so ||F_A F_D||_F^2 = N_s.  ``residual`` is the final
    approximation error ||F_opt - F_A F_D||_F and ``initial_residual`` the
    error of the phase-projection starting point.
    """

    F_A: np.ndarray
    F_D: np.ndarray
    residual: float
    initial_residual: float


def _phase_project(matrix: np.ndarray, scale: float) -> np.ndarray:
    return scale * np.exp(1j * np.angle(matrix))


def alternating_factorize(
    target: np.ndarray,
    num_rf: int,
    scale: float,
    max_iters: int = 200,
    tol: float = 1e-12,
):
    """Approximate ``target`` (n x k, k <= num_rf) by A @ B with |A_ij| = scale.

    Starts from A0 = phase projection of target (completed with extra
    left-singular directions when num_rf > k) and B0 = rectangular identity,
    then alternates a least-squares update of B with a phase projection of
    target @ B^H.  Only improving iterates are accepted, so the recorded
    residual history is non-increasing.

    Returns (A, B, history) with history[0] the initialization residual.
    """
    n, k = target.shape
    if num_rf < k:
        raise ValueError(f"num_rf={num_rf} must be >= number of columns {k}")

    if num_rf > k:
        u_full = np.linalg.svd(target, full_matrices=True)[0]
        base = np.concatenate([target, u_full[:, k:num_rf]], axis=1)
    else:
        base = target
    A = _phase_project(base, scale)
    B = np.eye(num_rf, k, dtype=complex)
    residual = float(np.linalg.norm(target - A @ B))
    history = [residual]

    for _ in range(max_iters):
        B_new = np.linalg.lstsq(A, target, rcond=None)[0]
        A_new = _phase_project(target @ B_new.conj().T, scale)
        # re-solve B against the updated phases before judging the step
        B_new = np.linalg.lstsq(A_new, target, rcond=None)[0]
        r_new = float(np.linalg.norm(target - A_new @ B_new))
        if r_new >= residual - tol:
            if r_new < residual:
                A, B, residual = A_new, B_new, r_new
                history.append(residual)
            break
        A, B, residual = A_new, B_new, r_new
        history.append(residual)

    return A, B, history


def factorize_precoder(
    F_opt: np.ndarray,
    num_rf_chains: int,
    max_iters: int = 200,
    tol: float = 1e-12,
) -> HybridPrecoder:
    """Factor the optimal precoder under the phase-shifter constraint.

    Requires num_rf_chains >= N_s.  The returned digital factor is rescaled
    so the transmit power constraint ||F_A F_D||_F^2 = N_s holds exactly.
    """
    n_t, n_s = F_opt.shape
    if num_rf_chains < n_s:
        raise ValueError(f"num_rf_chains={num_rf_chains} < num_streams={n_s}")

    scale = 1.0 / np.sqrt(n_t)
    F_A, F_D, history = alternating_factorize(F_opt, num_rf_chains, scale, max_iters, tol)

    product_norm = np.linalg.norm(F_A @ F_D)
    if product_norm == 0:
        raise ValueError("degenerate factorization with zero product norm")
    F_D = F_D * (np.sqrt(n_s) / product_norm)
    residual = float(np.linalg.norm(F_opt - F_A @ F_D))
    return HybridPrecoder(
        F_A=F_A, F_D=F_D, residual=residual, initial_residual=history[0]
    )


def effective_transmit_matrix(
    channel: ChannelRealization, precoder: HybridPrecoder | None = None
) -> np.ndarray:
    """H times the precoder: U diag(sigma) in ideal mode (precoder=None),
    H @ F_A @ F_D in hybrid mode."""
    if precoder is None:
        return channel.U * channel.sigma
    return channel.H @ precoder.F_A @ precoder.F_D
