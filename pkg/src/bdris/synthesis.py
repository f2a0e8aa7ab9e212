"""Closed-form synthesis of symmetric unitary scattering matrices.

A lossless reciprocal N-port tunable network has a complex symmetric unitary
scattering matrix. For a cascade link ``h_rt + h_ri @ Theta @ h_it`` the
coherent power is maximized, over all such matrices, by

    Theta = V @ diag(exp(j d)) @ V.T,

where V is a real orthonormal basis chosen so that the forward and backward
channel images have entrywise equal magnitude, and d co-phases every term.
The basis comes from diagonalizing the real symmetric difference of the two
channel Gram forms: its spectrum is trace-free with at most two eigenvalues
of each sign, which admits an explicit orthonormal solution of the
annihilation condition t' diag(delta) t = 0 (built case by case for
2, 3 and >=4 nonzero eigenvalues).

Block-diagonal (group-connected) surfaces apply the same construction per
group and co-phase the groups; the resulting received power meets the
Cauchy-Schwarz upper bound exactly for every channel realization.

The batched kernel `synthesize_blocks` is the production path used by the
Monte-Carlo experiment harness; `synthesize_block` / `synthesize_group` are
the single-shot entry points.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import (
    DegenerateChannelError,
    InternalConsistencyError,
    InvalidInputError,
)
from .linalg import EigenResult, eigh_desc_batch, sym_eig_desc

__all__ = [
    "EPS_DEPENDENCE",
    "EPS_RANK",
    "ScatteringMatrix",
    "QuadFormSystem",
    "PowerBounds",
    "PropositionReport",
    "BlockBatch",
    "build_quadform",
    "build_T",
    "synthesize_block",
    "synthesize_blocks",
    "synthesize_group",
    "received_power",
    "upper_bounds",
    "verify_propositions",
]

# Channels are declared linearly dependent when their unit-vector alignment
# reaches 1 - EPS_DEPENDENCE; eigenvalues below EPS_RANK * max|delta| are
# treated as exactly zero.
EPS_DEPENDENCE = 1e-9
EPS_RANK = 1e-9


@dataclass(frozen=True)
class ScatteringMatrix:
    """Block-diagonal scattering matrix of a group-connected surface.

    Each block is complex symmetric unitary (up to float rounding). The
    dense matrix is only assembled on request; the memory footprint stays
    O(group_size^2 * n_groups).
    """

    blocks: tuple
    group_size: int

    @property
    def n_elements(self) -> int:
        return self.group_size * len(self.blocks)

    def dense(self) -> np.ndarray:
        n = self.n_elements
        out = np.zeros((n, n), dtype=complex)
        g = self.group_size
        for i, blk in enumerate(self.blocks):
            out[i * g : (i + 1) * g, i * g : (i + 1) * g] = blk
        return out

    def apply(self, h_ri: np.ndarray, h_it: np.ndarray) -> complex:
        """Cascade gain ``h_ri @ Theta @ h_it`` without assembling Theta."""
        h_ri = np.asarray(h_ri).ravel()
        h_it = np.asarray(h_it).ravel()
        if h_ri.size != self.n_elements or h_it.size != self.n_elements:
            raise InvalidInputError("channel length does not match the scattering matrix")
        g = self.group_size
        total = 0.0 + 0.0j
        for i, blk in enumerate(self.blocks):
            total += h_ri[i * g : (i + 1) * g] @ blk @ h_it[i * g : (i + 1) * g]
        return complex(total)

    def constraint_residuals(self) -> tuple[float, float]:
        """Worst-case (symmetry, unitarity) entrywise residuals over blocks."""
        sym = 0.0
        uni = 0.0
        eye = np.eye(self.group_size)
        for blk in self.blocks:
            sym = max(sym, float(np.abs(blk - blk.T).max()))
            uni = max(uni, float(np.abs(blk.conj().T @ blk - eye).max()))
        return sym, uni


@dataclass(frozen=True)
class QuadFormSystem:
    """Symmetric difference of the two channel Gram forms with its spectrum."""

    a: np.ndarray
    eig: EigenResult
    delta: np.ndarray


class PowerBounds(NamedTuple):
    """Received-power upper bounds for the three connectivity architectures."""

    single: float
    group: float
    fully: float


def _as_unit_pair(h_ri, h_it) -> tuple[np.ndarray, np.ndarray]:
    h_ri = np.asarray(h_ri, dtype=complex).ravel()
    h_it = np.asarray(h_it, dtype=complex).ravel()
    if h_ri.size != h_it.size:
        raise InvalidInputError("channel vectors must have equal length")
    nri = np.linalg.norm(h_ri)
    nit = np.linalg.norm(h_it)
    if nri == 0.0 or nit == 0.0:
        raise DegenerateChannelError("zero-norm channel vector")
    return h_ri / nri, h_it / nit


def build_quadform(h_ri, h_it) -> QuadFormSystem:
    """Real symmetric trace-free matrix whose annihilators equalize the
    forward/backward channel image magnitudes.

    Inputs are normalized defensively; both must be nonzero.
    """
    u, t = _as_unit_pair(h_ri, h_it)
    # Symmetric parts of the Hermitian outer products are their real parts.
    a = np.outer(u.conj(), u).real - np.outer(t, t.conj()).real
    eig = sym_eig_desc(a)
    return QuadFormSystem(a=a, eig=eig, delta=eig.eigenvalues)


def _pair_columns(n, i_pos, i_neg, d):
    """Two orthonormal annihilating columns for one (+,-) eigenvalue pair."""
    span = d[i_pos] - d[i_neg]
    x = math.sqrt(-d[i_neg] / span)
    y = math.sqrt(d[i_pos] / span)
    c1 = np.zeros(n)
    c2 = np.zeros(n)
    c1[i_pos], c1[i_neg] = x, y
    c2[i_pos], c2[i_neg] = y, -x
    return [c1, c2]


def _triple_columns(n, idx, d):
    """Three orthonormal annihilating columns for a trace-free triple."""
    ia, ib, ic = idx  # values in descending order, d[ia] > 0 > d[ic]
    span = d[ia] - d[ic]
    x = math.sqrt(-d[ic] / span)
    z = math.sqrt(d[ia] / span)
    p = math.sqrt(d[ia] / (2.0 * span))
    q = math.sqrt(-d[ic] / (2.0 * span))
    h = math.sqrt(0.5)
    c1 = np.zeros(n)
    c1[ia], c1[ic] = x, z
    c2 = np.zeros(n)
    c2[ia], c2[ib], c2[ic] = p, h, -q
    c3 = np.zeros(n)
    c3[ia], c3[ib], c3[ic] = -p, h, q
    return [c1, c2, c3]


def _quad_columns(n, pos, neg, d):
    """Four orthonormal annihilating columns for the (2+, 2-) pattern."""
    p1, p2 = pos
    m1, m2 = neg
    s1 = d[p1] - d[m1]
    s2 = d[p2] - d[m2]
    x1 = math.sqrt(-d[m1] / s1)
    y1 = math.sqrt(d[p1] / s1)
    x2 = math.sqrt(-d[m2] / s2)
    y2 = math.sqrt(d[p2] / s2)
    h = math.sqrt(0.5)
    c1 = np.zeros(n)
    c1[p1], c1[m1] = x1, y1
    c2 = np.zeros(n)
    c2[p2], c2[m2] = x2, y2
    c3 = np.zeros(n)
    c3[p1], c3[p2], c3[m1], c3[m2] = y1 * h, y2 * h, -x1 * h, -x2 * h
    c4 = np.zeros(n)
    c4[p1], c4[p2], c4[m1], c4[m2] = y1 * h, -y2 * h, -x1 * h, x2 * h
    return [c1, c2, c3, c4]


def build_T(delta, n: Optional[int] = None) -> np.ndarray:
    """Real orthonormal matrix whose columns annihilate ``diag(delta)``.

    ``delta`` must be sorted non-increasing with (numerically) zero sum, and
    carry at most two eigenvalues of each sign, as produced by
    `build_quadform`. Degenerate patterns from rank-deficient channels
    (one positive and/or one negative eigenvalue) are handled by the pair
    and triple constructions on the nonzero subspace, with identity columns
    spanning the kernel.
    """
    delta = np.asarray(delta, dtype=float).ravel()
    if n is None:
        n = delta.size
    elif n != delta.size:
        raise InvalidInputError("dimension does not match the eigenvalue count")
    if not np.all(np.isfinite(delta)):
        raise InvalidInputError("eigenvalues contain non-finite entries")
    scale = float(np.abs(delta).max()) if n else 0.0
    if scale == 0.0:
        return np.eye(n)
    if np.any(np.diff(delta) > 1e-9 * scale):
        raise InvalidInputError("eigenvalues must be sorted in non-increasing order")
    tol = EPS_RANK * scale
    pos = np.flatnonzero(delta > tol)
    neg = np.flatnonzero(delta < -tol)
    zero = np.flatnonzero(np.abs(delta) <= tol)
    if pos.size == 0 or neg.size == 0:
        raise InternalConsistencyError(
            "nonzero eigenvalues without a sign change; impossible for a trace-free form"
        )
    if pos.size > 2 or neg.size > 2:
        raise InternalConsistencyError(
            f"unsupported sign pattern ({pos.size}+, {neg.size}-); "
            "channel quadratic forms carry at most two eigenvalues per sign"
        )
    nz = pos.size + neg.size
    if nz == 2:
        cols = _pair_columns(n, pos[0], neg[0], delta)
    elif nz == 3:
        cols = _triple_columns(n, np.concatenate([pos, neg]), delta)
    else:
        cols = _quad_columns(n, pos, neg, delta)
    for i in zero:
        e = np.zeros(n)
        e[i] = 1.0
        cols.append(e)
    return np.column_stack(cols)


def _t_batch(delta: np.ndarray) -> np.ndarray:
    """Vectorized annihilating bases for batched trace-free spectra (N >= 2).

    The constructions only need clamped eigenvalue signs plus the zero-sum
    property, so they cover the degenerate (rank-deficient) patterns with no
    threshold: a sign that rounds across zero is clamped, the corresponding
    column degenerates into a kernel direction, and annihilation still holds
    through the trace identity. The trailing slots of the two outer pairs
    are always strictly negative-definite enough for the divisions: the
    descending maximum obeys ``delta[0] >= scale/2`` and the minimum
    ``delta[-1] <= -scale/2`` whenever the spectrum is nonzero.
    """
    b, n = delta.shape
    t = np.zeros((b, n, n))
    h = math.sqrt(0.5)
    if n == 2:
        # Constant basis: annihilation reduces to the zero-trace identity.
        t[:, 0, 0] = t[:, 1, 0] = t[:, 0, 1] = h
        t[:, 1, 1] = -h
        return t
    if n == 3:
        d1 = np.maximum(delta[:, 0], 0.0)
        m1 = np.minimum(delta[:, 2], 0.0)
        span = np.maximum(d1 - m1, np.finfo(float).tiny)
        x = np.sqrt(-m1 / span)
        z = np.sqrt(d1 / span)
        p = np.sqrt(d1 / (2.0 * span))
        q = np.sqrt(-m1 / (2.0 * span))
        t[:, 0, 0], t[:, 2, 0] = x, z
        t[:, 0, 1], t[:, 1, 1], t[:, 2, 1] = p, h, -q
        t[:, 0, 2], t[:, 1, 2], t[:, 2, 2] = -p, h, q
        return t
    d1 = np.maximum(delta[:, 0], 0.0)
    d2 = np.maximum(delta[:, 1], 0.0)
    m1 = np.minimum(delta[:, n - 2], 0.0)
    m2 = np.minimum(delta[:, n - 1], 0.0)
    tiny = np.finfo(float).tiny
    s1 = np.maximum(d1 - m1, tiny)
    s2 = np.maximum(d2 - m2, tiny)
    x1, y1 = np.sqrt(-m1 / s1), np.sqrt(d1 / s1)
    x2, y2 = np.sqrt(-m2 / s2), np.sqrt(d2 / s2)
    t[:, 0, 0], t[:, n - 2, 0] = x1, y1
    t[:, 1, 1], t[:, n - 1, 1] = x2, y2
    t[:, 0, 2], t[:, 1, 2] = y1 * h, y2 * h
    t[:, n - 2, 2], t[:, n - 1, 2] = -x1 * h, -x2 * h
    t[:, 0, 3], t[:, 1, 3] = y1 * h, -y2 * h
    t[:, n - 2, 3], t[:, n - 1, 3] = -x1 * h, x2 * h
    idx = np.arange(4, n)
    t[:, idx - 2, idx] = 1.0
    return t


@dataclass
class BlockBatch:
    """Result of a batched block synthesis.

    ``v`` and ``d_phase`` hold the factors Theta = V diag(d) V^T per item;
    ``theta`` is the materialized matrix stack when requested. ``unit_gain``
    is the cascade gain of the unit-normalized channels through the
    synthesized block (1 for nonzero channels, 0 for all-zero ones) and
    ``gain`` the gain of the raw channels.
    """

    v: np.ndarray
    d_phase: np.ndarray
    unit_gain: np.ndarray
    norm_ri: np.ndarray
    norm_it: np.ndarray
    theta: Optional[np.ndarray] = None

    @property
    def gain(self) -> np.ndarray:
        return self.norm_ri * self.norm_it * self.unit_gain

    def orthonormality_residuals(self) -> np.ndarray:
        """Per-item max |V^T V - I|; certifies unitarity of V diag(d) V^T."""
        eye = np.eye(self.v.shape[-1])
        return np.abs(self.v.transpose(0, 2, 1) @ self.v - eye).max(axis=(1, 2))


def synthesize_blocks(h_ri: np.ndarray, h_it: np.ndarray, materialize: bool = True) -> BlockBatch:
    """Optimal fully connected blocks for a batch of channel pairs.

    Parameters
    ----------
    h_ri, h_it : (B, N) complex arrays
        Rows are surface->receiver / transmitter->surface channel pairs.
        All-zero rows are legal (e.g. masked sectors) and yield the identity
        block with zero gain.
    materialize : bool
        Assemble the dense (B, N, N) block stack. When False only the
        factors are returned and gains are evaluated through them.
    """
    h_ri = np.asarray(h_ri, dtype=complex)
    h_it = np.asarray(h_it, dtype=complex)
    if h_ri.ndim != 2 or h_ri.shape != h_it.shape:
        raise InvalidInputError("expected matching (B, N) channel batches")
    b, n = h_ri.shape

    norm_ri = np.linalg.norm(h_ri, axis=1)
    norm_it = np.linalg.norm(h_it, axis=1)
    nonzero = (norm_ri > 0.0) & (norm_it > 0.0)
    u = h_ri / np.where(norm_ri > 0.0, norm_ri, 1.0)[:, None]
    t = h_it / np.where(norm_it > 0.0, norm_it, 1.0)[:, None]

    align = np.abs(np.einsum("bn,bn->b", u, t.conj()))
    independent = nonzero & (align < 1.0 - EPS_DEPENDENCE)

    # Identity basis covers the dependent branch (diagonal phases suffice)
    # and the all-zero items; independent ones get the annihilating basis.
    v = np.broadcast_to(np.eye(n), (b, n, n)).copy()
    if np.any(independent) and n >= 2:
        ui = u[independent]
        ti = t[independent]
        parts = np.stack([ui.real, ui.imag, ti.real, ti.imag], axis=1)
        signs = np.array([1.0, 1.0, -1.0, -1.0])
        a = parts.transpose(0, 2, 1) @ (signs[None, :, None] * parts)
        delta, basis = eigh_desc_batch(a)
        v[independent] = basis @ _t_batch(delta)

    h_fwd = np.einsum("bn,bnm->bm", u, v)
    h_bwd = np.einsum("bnm,bn->bm", v, t)
    d_phase = np.exp(-1j * (np.angle(h_fwd) + np.angle(h_bwd)))

    theta = None
    if materialize:
        theta = (v * d_phase[:, None, :]) @ v.transpose(0, 2, 1)
        unit_gain = np.einsum("bn,bnm,bm->b", u, theta, t)
    else:
        unit_gain = np.einsum("bm,bm,bm->b", h_fwd, d_phase, h_bwd)
    unit_gain = np.where(nonzero, unit_gain, 0.0)
    return BlockBatch(
        v=v,
        d_phase=d_phase,
        unit_gain=unit_gain,
        norm_ri=norm_ri,
        norm_it=norm_it,
        theta=theta,
    )


def synthesize_block(h_ri, h_it) -> np.ndarray:
    """Optimal fully connected block for a single channel pair.

    Returns the complex symmetric unitary matrix through which the
    normalized cascade gain equals 1 (real, phase zero). Raises
    DegenerateChannelError for a zero channel.
    """
    u, t = _as_unit_pair(h_ri, h_it)
    batch = synthesize_blocks(u[None, :], t[None, :])
    return batch.theta[0]


def synthesize_group(h_rt, h_ri, h_it, n_g: int) -> ScatteringMatrix:
    """Optimal group-connected scattering matrix, direct link co-phased.

    Every group block is synthesized on its truncated channels and the whole
    matrix is rotated by the direct-link phase (no-op when ``h_rt`` is 0, the
    phase of 0 being taken as 0), so group contributions add coherently with
    the direct path. Groups whose truncated channel is all zero (masked
    sectors) get an identity block. The received power equals the
    group-architecture upper bound.
    """
    h_ri = np.asarray(h_ri, dtype=complex).ravel()
    h_it = np.asarray(h_it, dtype=complex).ravel()
    if h_ri.size != h_it.size:
        raise InvalidInputError("channel vectors must have equal length")
    if n_g < 1 or h_ri.size % n_g != 0:
        raise InvalidInputError(
            f"group size {n_g} does not divide the element count {h_ri.size}"
        )
    g = h_ri.size // n_g
    batch = synthesize_blocks(h_ri.reshape(g, n_g), h_it.reshape(g, n_g))
    lift = np.exp(1j * np.angle(complex(h_rt)))
    return ScatteringMatrix(blocks=tuple(lift * batch.theta), group_size=n_g)


def received_power(h_rt, h_ri, h_it, theta: Union[ScatteringMatrix, np.ndarray], p_t: float = 1.0) -> float:
    """``p_t * |h_rt + h_ri @ Theta @ h_it|**2`` in watts."""
    if isinstance(theta, ScatteringMatrix):
        gain = theta.apply(h_ri, h_it)
    else:
        gain = complex(np.asarray(h_ri).ravel() @ np.asarray(theta) @ np.asarray(h_it).ravel())
    return p_t * abs(complex(h_rt) + gain) ** 2


def upper_bounds(h_rt, h_ri, h_it, n_g: int, p_t: float = 1.0) -> PowerBounds:
    """Received-power bounds for single / group(n_g) / fully connected surfaces.

    Nested by Cauchy-Schwarz: single <= group <= fully for any channels.
    """
    h_ri = np.asarray(h_ri, dtype=complex).ravel()
    h_it = np.asarray(h_it, dtype=complex).ravel()
    if h_ri.size != h_it.size:
        raise InvalidInputError("channel vectors must have equal length")
    if n_g < 1 or h_ri.size % n_g != 0:
        raise InvalidInputError("group size must divide the element count")
    direct = abs(complex(h_rt))
    single = np.abs(h_ri * h_it).sum()
    rig = h_ri.reshape(-1, n_g)
    itg = h_it.reshape(-1, n_g)
    group = (np.linalg.norm(rig, axis=1) * np.linalg.norm(itg, axis=1)).sum()
    fully = np.linalg.norm(h_ri) * np.linalg.norm(h_it)
    return PowerBounds(
        single=p_t * (direct + single) ** 2,
        group=p_t * (direct + group) ** 2,
        fully=p_t * (direct + fully) ** 2,
    )


@dataclass(frozen=True)
class PropositionReport:
    """Numerical audit of the spectral structure of a channel quadratic form."""

    n: int
    rank: int
    trace_residual: float
    sign_pattern: tuple[int, int]
    weyl_ok: bool
    det_positive: Optional[bool]

    @cached_property
    def rank_ok(self) -> bool:
        return self.rank == min(4, self.n)

    @cached_property
    def sign_ok(self) -> bool:
        npos, nneg = self.sign_pattern
        if self.n >= 4:
            return npos == 2 and nneg == 2
        return npos >= 1 and nneg >= 1 and npos + nneg == self.n

    @property
    def ok(self) -> bool:
        return (
            self.rank_ok
            and self.sign_ok
            and self.trace_residual <= 1e-10
            and self.weyl_ok
            and self.det_positive is not False
        )


def verify_propositions(qf: QuadFormSystem) -> PropositionReport:
    """Check rank, trace, sign pattern and interlacing consequences.

    For generic independent channels the expected structure is: rank
    min(4, N), zero trace, two positive and two negative eigenvalues when
    N >= 4 (with the interior eigenvalues at positions 3 and N-2 exactly
    zero when N > 4), and a positive determinant when N = 4.
    """
    d = qf.delta
    n = d.size
    scale = float(np.abs(d).max())
    tol = EPS_RANK * max(scale, np.finfo(float).tiny)
    rank = int((np.abs(d) > tol).sum())
    trace_residual = float(abs(d.sum()) / max(scale, np.finfo(float).tiny))
    npos = int((d > tol).sum())
    nneg = int((d < -tol).sum())
    if n > 4:
        weyl_ok = bool(abs(d[2]) <= tol and abs(d[n - 3]) <= tol)
    else:
        weyl_ok = True
    det_positive = bool(np.prod(d) > 0.0) if n == 4 else None
    return PropositionReport(
        n=n,
        rank=rank,
        trace_residual=trace_residual,
        sign_pattern=(npos, nneg),
        weyl_ok=weyl_ok,
        det_positive=det_positive,
    )
