"""Weighted sum-power maximization for multi-user single-antenna receivers.

Stacking the weight-scaled user channels into one matrix turns the weighted
sum power under a unit-power single-stream precoder into the squared
spectral norm of the stack, so the multi-antenna machinery applies
unchanged: closed-form bound achievement without direct links, alternating
refinement otherwise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError, DegenerateInputError, InvalidInputError
from .linalg import dominant_svd, spectral_norm
from .synthesis import ScatteringMatrix, synthesize_block
from .mimo import BeamformingPair, DesignReport, alternating_design

__all__ = [
    "StackedSystem",
    "stack_weighted",
    "equivalent_channel",
    "optimal_precoder",
    "design_fc_no_direct_mu",
    "design_general_mu",
    "weighted_sum_power",
]


@dataclass(frozen=True)
class StackedSystem:
    """Weight-scaled multi-user channels.

    Row k of ``g_rt`` / ``g_ri`` is ``sqrt(weights[k])`` times user k's
    direct / surface->user channel; ``h_it`` is the common
    transmitter->surface link.
    """

    g_rt: np.ndarray
    g_ri: np.ndarray
    h_it: np.ndarray
    weights: np.ndarray

    @property
    def n_users(self) -> int:
        return self.g_ri.shape[0]


def stack_weighted(h_rt_users, h_ri_users, h_it, weights) -> StackedSystem:
    """Scale each user's channels by the square root of its power weight."""
    h_rt_users = np.atleast_2d(np.asarray(h_rt_users, dtype=complex))
    h_ri_users = np.atleast_2d(np.asarray(h_ri_users, dtype=complex))
    h_it = np.asarray(h_it, dtype=complex)
    if h_it.ndim == 1:
        h_it = h_it[:, None]
    weights = np.asarray(weights, dtype=float).ravel()
    if np.any(weights <= 0):
        raise InvalidInputError("user power weights must be positive")
    if not (h_rt_users.shape[0] == h_ri_users.shape[0] == weights.size):
        raise InvalidInputError("per-user channel rows and weights disagree")
    if h_ri_users.shape[1] != h_it.shape[0] or h_rt_users.shape[1] != h_it.shape[1]:
        raise InvalidInputError("channel dimensions are inconsistent")
    root = np.sqrt(weights)[:, None]
    return StackedSystem(
        g_rt=root * h_rt_users,
        g_ri=root * h_ri_users,
        h_it=h_it,
        weights=weights,
    )


def equivalent_channel(system: StackedSystem, theta) -> np.ndarray:
    """Stacked user channel ``G_RT + G_RI @ Theta @ H_IT`` for a given matrix."""
    if isinstance(theta, ScatteringMatrix):
        g = theta.group_size
        out = np.array(system.g_rt, copy=True)
        for i, blk in enumerate(theta.blocks):
            out += system.g_ri[:, i * g : (i + 1) * g] @ blk @ system.h_it[i * g : (i + 1) * g, :]
        return out
    return system.g_rt + system.g_ri @ np.asarray(theta) @ system.h_it


def optimal_precoder(system: StackedSystem, theta) -> np.ndarray:
    """Unit precoder aligned with the dominant eigenvector of the stacked Gram.

    Equals the dominant right singular vector of the equivalent channel;
    ties in a degenerate spectrum resolve to the backend's first vector with
    the phase pinned, which is deterministic and loses no optimality.
    """
    h = equivalent_channel(system, theta)
    try:
        return dominant_svd(h).v
    except DegenerateInputError as exc:
        raise DegenerateChannelError(str(exc)) from exc


def weighted_sum_power(system: StackedSystem, theta, precoders, p_t: float = 1.0) -> float:
    """Weighted sum of per-user received powers for given precoding columns.

    ``precoders`` is (N_T,) or (N_T, J); total transmit power
    ``sum_j ||w_j||^2`` must equal 1.
    """
    w = np.asarray(precoders, dtype=complex)
    if w.ndim == 1:
        w = w[:, None]
    total = float((np.abs(w) ** 2).sum())
    if abs(total - 1.0) > 1e-9:
        raise InvalidInputError(f"precoder power must be 1, got {total!r}")
    h = equivalent_channel(system, theta)
    return p_t * float((np.abs(h @ w) ** 2).sum())


def design_fc_no_direct_mu(system: StackedSystem, p_t: float = 1.0):
    """Closed-form optimum for fully connected surfaces without direct links.

    Returns (theta, w, sum_power) with
    ``sum_power = p_t * ||G_RI||^2 * ||H_IT||^2`` achieved exactly.
    """
    try:
        ri = dominant_svd(system.g_ri)
        it = dominant_svd(system.h_it)
    except DegenerateInputError as exc:
        raise DegenerateChannelError(str(exc)) from exc
    block = synthesize_block(ri.v.conj(), it.u)
    theta = ScatteringMatrix(blocks=(block,), group_size=system.g_ri.shape[1])
    no_direct = StackedSystem(
        g_rt=np.zeros_like(system.g_rt),
        g_ri=system.g_ri,
        h_it=system.h_it,
        weights=system.weights,
    )
    w = optimal_precoder(no_direct, theta)
    s_r = p_t * spectral_norm(equivalent_channel(no_direct, theta)) ** 2
    return theta, w, float(s_r)


def design_general_mu(
    system: StackedSystem,
    n_g: int,
    p_t: float = 1.0,
    epsilon: float = 1e-6,
    max_iters: int = 100,
) -> DesignReport:
    """Alternating design on the stacked system for any group size / direct links.

    The stacked matrix plays the role of a multi-antenna receiver channel;
    the auxiliary combiner found during the alternation is reported in
    ``pair.g`` while ``pair.w`` is replaced by the true optimal precoder for
    the final matrix. The last trace entry is the achieved weighted sum
    power ``p_t * ||H||^2``.
    """
    report = alternating_design(
        system.g_rt, system.g_ri, system.h_it, n_g, p_t=p_t, epsilon=epsilon, max_iters=max_iters
    )
    w = optimal_precoder(system, report.theta)
    return DesignReport(
        theta=report.theta,
        pair=BeamformingPair(w=w, g=report.pair.g),
        power_trace=report.power_trace,
        bound=report.bound,
        lower_bound=report.lower_bound,
        iterations=report.iterations,
        converged=report.converged,
    )
