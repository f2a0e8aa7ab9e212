"""Independent reference designs and a brute-force optimality oracle.

These routines deliberately avoid the closed-form machinery in
`bdris.synthesis` so they can serve as cross-checks: the diagonal
(single-connected) phase design, the reactance-to-scattering network map,
and a grid/multistart search over the full symmetric unitary manifold for
tiny element counts. The oracle's central claim: it never beats the
closed-form construction by more than its own resolution.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateChannelError, InvalidInputError, UnsupportedSizeError

__all__ = [
    "ReactanceNetwork",
    "OracleResult",
    "reactance_to_scattering",
    "single_connected_design",
    "brute_force_optimum",
    "no_ris_power",
]


@dataclass(frozen=True)
class ReactanceNetwork:
    """Reciprocal purely reactive N-port termination.

    ``x_i`` is the real symmetric reactance matrix in ohms, ``z0`` the
    positive reference impedance (50 ohm by default).
    """

    x_i: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        x = np.asarray(self.x_i, dtype=float)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise InvalidInputError("reactance matrix must be square")
        if np.abs(x - x.T).max() > 1e-9 * max(1.0, np.abs(x).max()):
            raise InvalidInputError("reactance matrix must be symmetric")
        if self.z0 <= 0:
            raise InvalidInputError("reference impedance must be positive")
        object.__setattr__(self, "x_i", 0.5 * (x + x.T))


def reactance_to_scattering(net: ReactanceNetwork) -> np.ndarray:
    """Scattering matrix ``(jX + Z0 I)^-1 (jX - Z0 I)`` of a reactive network.

    Always well defined for Z0 > 0 (jX + Z0 I has eigenvalues with real part
    Z0). The result is complex symmetric unitary; a diagonal X maps to the
    diagonal of per-port reflection coefficients ``(jx - Z0)/(jx + Z0)``.
    """
    x = net.x_i
    n = x.shape[0]
    eye = np.eye(n)
    jx = 1j * x
    return np.linalg.solve(jx + net.z0 * eye, jx - net.z0 * eye)


def single_connected_design(h_rt, h_ri, h_it, p_t: float = 1.0) -> tuple[np.ndarray, float]:
    """Optimal diagonal (per-element phase) design and its received power.

    Each phase conjugates the cascade through its element,
    ``theta_n = -arg(h_ri[n]) - arg(h_it[n])``, and the whole diagonal is
    rotated to align with the direct link. Returns (diagonal entries, power).
    """
    h_ri = np.asarray(h_ri, dtype=complex).ravel()
    h_it = np.asarray(h_it, dtype=complex).ravel()
    if h_ri.size != h_it.size:
        raise InvalidInputError("channel vectors must have equal length")
    if not (np.any(h_ri) and np.any(h_it)):
        raise DegenerateChannelError("zero-norm channel vector")
    phases = -np.angle(h_ri) - np.angle(h_it)
    diag = np.exp(1j * (phases + np.angle(complex(h_rt))))
    power = p_t * (abs(complex(h_rt)) + np.abs(h_ri * h_it).sum()) ** 2
    return diag, float(power)


def no_ris_power(h_rt, p_t: float) -> float:
    """Received power of the bare direct link, ``p_t * |h_rt|**2``."""
    return p_t * abs(complex(h_rt)) ** 2


class OracleResult(NamedTuple):
    """Best normalized power found by the search and the matrix achieving it."""

    value: float
    theta: np.ndarray


def _givens(n, i, j, phi):
    g = np.eye(n)
    c, s = np.cos(phi), np.sin(phi)
    g[i, i] = c
    g[j, j] = c
    g[i, j] = -s
    g[j, i] = s
    return g


def _orthogonal_from_angles(n: int, phis) -> np.ndarray:
    if n == 1:
        return np.eye(1)
    if n == 2:
        return _givens(2, 0, 1, phis[0])
    return _givens(3, 0, 1, phis[0]) @ _givens(3, 0, 2, phis[1]) @ _givens(3, 1, 2, phis[2])


def _theta_from_params(n, params):
    k = 1 if n == 2 else 3
    if n == 1:
        o = np.eye(1)
        d = np.exp(1j * np.asarray(params[:1]))
    else:
        o = _orthogonal_from_angles(n, params[:k])
        d = np.exp(1j * np.asarray(params[k : k + n]))
    return (o * d) @ o.T


def _objective(u, t, params):
    n = u.size
    th = _theta_from_params(n, params)
    return abs(u @ th @ t) ** 2


def _coordinate_refine(f, x0, spans, rounds=40, points=9, shrink=0.45):
    """Deterministic per-coordinate local grid refinement of a smooth maximum."""
    x = np.array(x0, dtype=float)
    best = f(x)
    spans = np.array(spans, dtype=float)
    for _ in range(rounds):
        for i in range(x.size):
            grid = x[i] + np.linspace(-spans[i], spans[i], points)
            vals = []
            xi = x.copy()
            for gval in grid:
                xi[i] = gval
                vals.append(f(xi))
            j = int(np.argmax(vals))
            if vals[j] > best:
                best = vals[j]
                x[i] = grid[j]
        spans *= shrink
        if spans.max() < 1e-13:
            break
    return x, best


def _oracle_2(u, t, grid_points):
    """Dense (rotation, phase, phase) grid followed by coordinate refinement."""
    phis = np.linspace(0.0, np.pi, grid_points, endpoint=False)
    ds = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    e1, e2 = np.exp(1j * ds), np.exp(1j * ds)
    best_val = -1.0
    best = None
    for phi in phis:
        o = _orthogonal_from_angles(2, [phi])
        a = u @ o
        bvec = o.T @ t
        c1 = a[0] * bvec[0]
        c2 = a[1] * bvec[1]
        # |c1 e^{jd1} + c2 e^{jd2}|^2 over the (d1, d2) grid
        vals = np.abs(c1 * e1[:, None] + c2 * e2[None, :]) ** 2
        k = np.unravel_index(np.argmax(vals), vals.shape)
        if vals[k] > best_val:
            best_val = float(vals[k])
            best = np.array([phi, ds[k[0]], ds[k[1]]])
    step = np.pi / grid_points
    f = lambda p: _objective(u, t, p)
    x, val = _coordinate_refine(f, best, [step, 2 * step, 2 * step])
    return val, x


def _oracle_3(u, t, n_starts, seed):
    """Random multistart over 3 rotation + 3 phase parameters, then refinement."""
    rng = np.random.default_rng(seed)
    phis = rng.uniform(0.0, np.pi, size=(n_starts, 3))
    ds = rng.uniform(0.0, 2.0 * np.pi, size=(n_starts, 3))
    c, s = np.cos(phis), np.sin(phis)
    o = np.zeros((n_starts, 3, 3))
    o[:, 0, 0] = c[:, 0] * c[:, 1]
    o[:, 0, 1] = -s[:, 0] * c[:, 2] - c[:, 0] * s[:, 1] * s[:, 2]
    o[:, 0, 2] = s[:, 0] * s[:, 2] - c[:, 0] * s[:, 1] * c[:, 2]
    o[:, 1, 0] = s[:, 0] * c[:, 1]
    o[:, 1, 1] = c[:, 0] * c[:, 2] - s[:, 0] * s[:, 1] * s[:, 2]
    o[:, 1, 2] = -c[:, 0] * s[:, 2] - s[:, 0] * s[:, 1] * c[:, 2]
    o[:, 2, 0] = s[:, 1]
    o[:, 2, 1] = c[:, 1] * s[:, 2]
    o[:, 2, 2] = c[:, 1] * c[:, 2]
    a = np.einsum("n,bnm->bm", u, o)
    bvec = np.einsum("bnm,n->bm", o, t)
    vals = np.abs(np.einsum("bm,bm,bm->b", a, np.exp(1j * ds), bvec)) ** 2
    order = np.argsort(vals)[::-1][:16]
    f = lambda p: _objective(u, t, p)
    best_val = -1.0
    best_x = None
    for i in order:
        x0 = np.concatenate([phis[i], ds[i]])
        x, val = _coordinate_refine(f, x0, [0.4, 0.4, 0.4, 0.8, 0.8, 0.8])
        if val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


def brute_force_optimum(h_ri, h_it, grid_points: int = 200, n_starts: int = 10_000, seed: int = 0) -> OracleResult:
    """Search the normalized power ``|h_ri_hat @ Theta @ h_it_hat|**2`` over
    the full symmetric unitary manifold, parameterized as
    ``O diag(exp(j d)) O^T`` with O real orthogonal.

    N = 2 uses a dense grid over (rotation angle, d1, d2) with coordinate
    refinement; N = 3 uses random multistart over three rotation angles plus
    three phases, refining the best candidates. Only N <= 3 is supported;
    larger manifolds are out of reach for an honest exhaustive search.
    """
    h_ri = np.asarray(h_ri, dtype=complex).ravel()
    h_it = np.asarray(h_it, dtype=complex).ravel()
    n = h_ri.size
    if n != h_it.size:
        raise InvalidInputError("channel vectors must have equal length")
    if n > 3:
        raise UnsupportedSizeError(f"oracle supports up to 3 elements, got {n}")
    nri = np.linalg.norm(h_ri)
    nit = np.linalg.norm(h_it)
    if nri == 0.0 or nit == 0.0:
        raise DegenerateChannelError("zero-norm channel vector")
    u = h_ri / nri
    t = h_it / nit
    if n == 1:
        d = -np.angle(u[0]) - np.angle(t[0])
        theta = np.array([[np.exp(1j * d)]])
        return OracleResult(value=float(abs(u @ theta @ t) ** 2), theta=theta)
    if n == 2:
        val, params = _oracle_2(u, t, grid_points)
    else:
        val, params = _oracle_3(u, t, n_starts, seed)
    return OracleResult(value=float(val), theta=_theta_from_params(n, params))
