"""Single-user MIMO link design: closed-form optimum and alternating refinement.

Without a direct link a fully connected surface can rotate the dominant
transmit-side eigenmode of the incoming channel exactly onto the dominant
receive-side eigenmode, so the spectral-norm product bound
``p_t * ||H_RI||^2 * ||H_IT||^2`` is achieved. With a direct link (or a
group-connected surface) no tight bound is known; the scattering matrix and
the rank-one beamforming pair are then optimized alternately, each half-step
solving its subproblem exactly, which makes the objective non-decreasing and
bounded, hence convergent.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateChannelError, DegenerateInputError, InvalidInputError
from .linalg import dominant_svd, spectral_norm
from .synthesis import ScatteringMatrix, synthesize_block, synthesize_group

__all__ = [
    "BeamformingPair",
    "DesignReport",
    "InitBounds",
    "design_fc_no_direct",
    "init_lower_bounds",
    "alternating_design",
]


@dataclass(frozen=True)
class BeamformingPair:
    """Unit-norm precoder ``w`` (N_T,) and combiner row ``g`` (N_R,)."""

    w: np.ndarray
    g: np.ndarray


@dataclass
class DesignReport:
    """Outcome of a link design run.

    ``power_trace`` holds the objective after every half-step (scattering
    update, then beamforming update) and is non-decreasing up to float
    rounding; ``bound`` is the applicable upper bound and ``lower_bound``
    the guaranteed first-iteration value.
    """

    theta: ScatteringMatrix
    pair: BeamformingPair
    power_trace: list
    bound: float
    lower_bound: float
    iterations: int
    converged: bool

    @property
    def power(self) -> float:
        return self.power_trace[-1]


class InitBounds(NamedTuple):
    """First-iteration powers of the two initialization strategies."""

    p_dir: float
    p_refl: float
    chosen: str
    w0: np.ndarray
    g0: np.ndarray


def _as_matrix(h, name):
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h[None, :] if name != "h_it" else h[:, None]
    if h.ndim != 2:
        raise InvalidInputError(f"{name} must be a matrix")
    return h


def _svd_or_basis(m):
    """Dominant triplet, falling back to first-basis-vector conventions for
    an all-zero matrix (whose singular vectors are undefined)."""
    if not np.any(m):
        u = np.zeros(m.shape[0], dtype=complex)
        v = np.zeros(m.shape[1], dtype=complex)
        u[0] = 1.0
        v[0] = 1.0
        return 0.0, u, v
    trip = dominant_svd(m)
    return trip.sigma, trip.u, trip.v


def _group_norm_sum(h_row: np.ndarray, h_col: np.ndarray, n_g: int) -> float:
    rig = h_row.reshape(-1, n_g)
    itg = h_col.reshape(-1, n_g)
    return float((np.linalg.norm(rig, axis=1) * np.linalg.norm(itg, axis=1)).sum())


def design_fc_no_direct(h_ri, h_it, p_t: float = 1.0) -> DesignReport:
    """Closed-form optimum for a fully connected surface without direct link.

    The block is synthesized on the dominant right singular vector of the
    surface->receiver channel (conjugated) and the dominant left singular
    vector of the transmitter->surface channel; the beamforming pair is the
    dominant singular pair of the resulting cascade. Achieves
    ``p_t * ||h_ri||^2 * ||h_it||^2``.
    """
    h_ri = _as_matrix(h_ri, "h_ri")
    h_it = _as_matrix(h_it, "h_it")
    if h_ri.shape[1] != h_it.shape[0]:
        raise InvalidInputError("surface dimensions of the two channels disagree")
    try:
        ri = dominant_svd(h_ri)
        it = dominant_svd(h_it)
    except DegenerateInputError as exc:
        raise DegenerateChannelError(str(exc)) from exc
    block = synthesize_block(ri.v.conj(), it.u)
    theta = ScatteringMatrix(blocks=(block,), group_size=h_ri.shape[1])
    cascade = h_ri @ block @ h_it
    sv = dominant_svd(cascade)
    power = p_t * sv.sigma**2
    bound = p_t * (ri.sigma * it.sigma) ** 2
    return DesignReport(
        theta=theta,
        pair=BeamformingPair(w=sv.v, g=sv.u.conj()),
        power_trace=[power],
        bound=bound,
        lower_bound=power,
        iterations=1,
        converged=True,
    )


def init_lower_bounds(h_rt, h_ri, h_it, n_g: int, p_t: float = 1.0) -> InitBounds:
    """Evaluate both beamforming initializations and pick the stronger one.

    The direct-mode start beamforms on the direct channel's dominant
    singular pair; the reflected-mode start on the dominant pair of the
    two surface links. Each formula is the power reached after the first
    scattering update under that start, so ``max(p_dir, p_refl)`` lower
    bounds the final design. Ties go to the direct start.
    """
    h_rt = _as_matrix(h_rt, "h_rt")
    h_ri = _as_matrix(h_ri, "h_ri")
    h_it = _as_matrix(h_it, "h_it")
    if h_ri.shape[1] != h_it.shape[0] or h_ri.shape[1] % n_g != 0:
        raise InvalidInputError("inconsistent dimensions or group size")
    s_rt, u_rt, v_rt = _svd_or_basis(h_rt)
    s_ri, u_ri, v_ri = _svd_or_basis(h_ri)
    s_it, u_it, v_it = _svd_or_basis(h_it)

    h_r = u_rt.conj() @ h_ri
    h_t = h_it @ v_rt
    p_dir = p_t * (s_rt + _group_norm_sum(h_r, h_t, n_g)) ** 2

    direct_term = abs(complex(u_ri.conj() @ h_rt @ v_it))
    p_refl = p_t * (direct_term + s_ri * s_it * _group_norm_sum(v_ri.conj(), u_it, n_g)) ** 2

    if p_dir >= p_refl:
        return InitBounds(p_dir, p_refl, "dir", w0=v_rt, g0=u_rt.conj())
    return InitBounds(p_dir, p_refl, "refl", w0=v_it, g0=u_ri.conj())


def _cascade(h_rt, h_ri, theta: ScatteringMatrix, h_it):
    g = theta.group_size
    out = np.array(h_rt, dtype=complex, copy=True)
    for i, blk in enumerate(theta.blocks):
        out += h_ri[:, i * g : (i + 1) * g] @ blk @ h_it[i * g : (i + 1) * g, :]
    return out


def alternating_design(
    h_rt,
    h_ri,
    h_it,
    n_g: int,
    p_t: float = 1.0,
    epsilon: float = 1e-6,
    max_iters: int = 100,
) -> DesignReport:
    """Alternate between the optimal scattering matrix for the current
    beamformers and the optimal beamformers for the current matrix.

    Stops when the fractional objective increase over one full iteration
    drops below ``epsilon``; if ``max_iters`` is exhausted first the report
    is returned with ``converged=False`` (never an exception).
    """
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    if max_iters < 1:
        raise InvalidInputError("max_iters must be positive")
    h_rt = _as_matrix(h_rt, "h_rt")
    h_ri = _as_matrix(h_ri, "h_ri")
    h_it = _as_matrix(h_it, "h_it")
    init = init_lower_bounds(h_rt, h_ri, h_it, n_g, p_t)
    w, g = init.w0, init.g0

    trace = []
    theta = None
    p_prev = None
    converged = False
    iterations = 0
    for it in range(1, max_iters + 1):
        h_rt_eff = complex(g @ h_rt @ w)
        h_ri_eff = g @ h_ri
        h_it_eff = h_it @ w
        theta = synthesize_group(h_rt_eff, h_ri_eff, h_it_eff, n_g)
        trace.append(p_t * abs(h_rt_eff + theta.apply(h_ri_eff, h_it_eff)) ** 2)

        cascade = _cascade(h_rt, h_ri, theta, h_it)
        sigma, u, v = _svd_or_basis(cascade)
        w, g = v, u.conj()
        p_full = p_t * sigma**2
        trace.append(p_full)
        iterations = it
        if p_prev is not None:
            if p_prev > 0.0:
                frac = (p_full - p_prev) / p_prev
            else:
                frac = 0.0 if p_full == 0.0 else math.inf
            if frac < epsilon:
                converged = True
                break
        p_prev = p_full

    bound = p_t * (spectral_norm(h_rt) + spectral_norm(h_ri) * spectral_norm(h_it)) ** 2
    return DesignReport(
        theta=theta,
        pair=BeamformingPair(w=w, g=g),
        power_trace=trace,
        bound=bound,
        lower_bound=max(init.p_dir, init.p_refl),
        iterations=iterations,
        converged=converged,
    )
