"""Scenario geometry, path loss and Rician/Rayleigh channel generation.

Channels follow the standard mixture model

    h = sqrt(L) * ( sqrt(K/(1+K)) * h_los + sqrt(1/(1+K)) * h_nlos ),

with h_nlos i.i.d. circularly symmetric complex Gaussian of unit variance
and K the Rician factor (linear; K=0 gives Rayleigh fading). The
line-of-sight term is the deterministic all-ones rank-one matrix; no array
steering geometry is modeled (see README for the convention and its
consequences).

All randomness is derived from a (seed, trial_index) pair, so every trial
has its own independent stream and the full experiment output is a pure
function of the configuration.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidGeometryError, InvalidInputError

__all__ = [
    "ScenarioConfig",
    "ChannelSet",
    "path_loss",
    "sample_channel",
    "transmissive_mask",
    "trial_rng",
    "build_scenario",
]

MODES = ("reflective", "transmissive")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulated deployment: geometry, propagation and system sizes.

    Positions are 2-D coordinates in meters (x = ground range, y = height).
    ``l0`` is the linear reference path gain at 1 m; ``k_f`` the linear
    Rician factor (0 = Rayleigh, ``math.inf`` = pure line of sight);
    ``p_t`` the transmit power in watts. Defaults reproduce the baseline
    deployment used throughout the bundled experiments.
    """

    tx_pos: tuple[float, float] = (0.0, 0.0)
    rx_pos: tuple[float, float] = (52.0, 0.0)
    ris_pos: tuple[float, float] = (50.0, 2.0)
    l0: float = 1e-3
    alpha_rt: float = 3.5
    alpha_ri: float = 2.8
    alpha_it: float = 2.0
    k_f: float = 0.0
    p_t: float = 10.0
    n_i: int = 16
    n_t: int = 1
    n_r: int = 1
    k_users: int = 1
    n_g: int = 1
    mode: str = "reflective"
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_i < 1 or self.n_t < 1 or self.n_r < 1 or self.k_users < 1:
            raise InvalidInputError("antenna/user counts must be positive")
        if self.n_g < 1 or self.n_i % self.n_g != 0:
            raise InvalidInputError(
                f"group size {self.n_g} must divide the element count {self.n_i}"
            )
        if self.k_f < 0:
            raise InvalidInputError("Rician factor must be nonnegative")
        if self.p_t <= 0:
            raise InvalidInputError("transmit power must be positive")
        if self.trials < 1:
            raise InvalidInputError("trial count must be positive")
        if self.mode == "transmissive" and self.n_i % 2 != 0:
            raise InvalidInputError("transmissive mode needs an even element count")

    @property
    def n_groups(self) -> int:
        return self.n_i // self.n_g

    def with_updates(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the direct, surface->receiver and transmitter->surface links.

    ``h_rt`` is (R, N_T), ``h_ri`` is (R, N_I) and ``h_it`` is (N_I, N_T),
    where R is the receive-antenna count for single-user runs and the user
    count for multi-user runs (one row per user). ``weights`` holds the
    positive per-user power weights (all ones by default).
    """

    h_rt: np.ndarray
    h_ri: np.ndarray
    h_it: np.ndarray
    weights: np.ndarray = field(default_factory=lambda: np.ones(1))

    def siso(self) -> tuple[complex, np.ndarray, np.ndarray]:
        """Flattened (h_rt, h_ri, h_it) view; requires a 1x1 link."""
        if self.h_rt.size != 1:
            raise InvalidInputError("siso() needs a single-antenna, single-user set")
        return complex(self.h_rt.ravel()[0]), self.h_ri.ravel(), self.h_it.ravel()


def path_loss(d: float, alpha: float, l0: float) -> float:
    """Distance-dependent linear power gain ``l0 * d**(-alpha)``.

    Raises InvalidGeometryError for non-positive distances.
    """
    if d <= 0:
        raise InvalidGeometryError(f"distance must be positive, got {d}")
    return l0 * d ** (-alpha)


def sample_channel(rows: int, cols: int, gain: float, k_f: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one (rows, cols) channel matrix with the given linear power gain.

    ``k_f = math.inf`` returns the deterministic line-of-sight matrix exactly;
    ``k_f = 0`` is pure Rayleigh fading.
    """
    if gain <= 0:
        raise InvalidInputError("channel power gain must be positive")
    if k_f < 0:
        raise InvalidInputError("Rician factor must be nonnegative")
    if math.isinf(k_f):
        return np.full((rows, cols), math.sqrt(gain), dtype=complex)
    z = rng.standard_normal((rows, cols, 2))
    nlos = (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)
    w_los = math.sqrt(k_f / (1.0 + k_f))
    w_nlos = math.sqrt(1.0 / (1.0 + k_f))
    return math.sqrt(gain) * (w_los + w_nlos * nlos)


def transmissive_mask(h_ri: np.ndarray, h_it: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero the entries blocked by the two-sector cell arrangement.

    Elements are paired into back-to-back cells; odd-numbered elements
    (1-based) face the transmitter and even-numbered ones face the receiver.
    Hence columns 1, 3, ... of ``h_ri`` and rows 2, 4, ... of ``h_it`` vanish.
    Idempotent.
    """
    h_ri = np.array(h_ri, copy=True)
    h_it = np.array(h_it, copy=True)
    h_ri[..., 0::2] = 0.0
    h_it[1::2, ...] = 0.0
    return h_ri, h_it


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent, reproducible random stream for one (seed, trial) pair."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial_index)]))


def _distances(cfg: ScenarioConfig) -> tuple[float, float, float]:
    tx = np.asarray(cfg.tx_pos, dtype=float)
    rx = np.asarray(cfg.rx_pos, dtype=float)
    ris = np.asarray(cfg.ris_pos, dtype=float)
    d_rt = float(np.linalg.norm(rx - tx))
    d_ri = float(np.linalg.norm(rx - ris))
    d_it = float(np.linalg.norm(ris - tx))
    if min(d_rt, d_ri, d_it) <= 0:
        raise InvalidGeometryError("coincident node positions")
    return d_rt, d_ri, d_it


def build_scenario(cfg: ScenarioConfig, trial_index: int) -> ChannelSet:
    """Generate the channel triplet for one Monte-Carlo trial.

    Deterministic in (cfg, trial_index): the same pair always yields a
    bit-identical ChannelSet. Draw order is fixed (direct link, then
    surface->receiver, then transmitter->surface). In transmissive mode the
    sector mask is applied after the draw, so switching modes does not
    perturb the underlying fading stream.
    """
    d_rt, d_ri, d_it = _distances(cfg)
    l_rt = path_loss(d_rt, cfg.alpha_rt, cfg.l0)
    l_ri = path_loss(d_ri, cfg.alpha_ri, cfg.l0)
    l_it = path_loss(d_it, cfg.alpha_it, cfg.l0)

    rows = cfg.k_users if cfg.k_users > 1 else cfg.n_r
    rng = trial_rng(cfg.seed, trial_index)
    h_rt = sample_channel(rows, cfg.n_t, l_rt, cfg.k_f, rng)
    h_ri = sample_channel(rows, cfg.n_i, l_ri, cfg.k_f, rng)
    h_it = sample_channel(cfg.n_i, cfg.n_t, l_it, cfg.k_f, rng)
    if cfg.mode == "transmissive":
        h_ri, h_it = transmissive_mask(h_ri, h_it)
    return ChannelSet(h_rt=h_rt, h_ri=h_ri, h_it=h_it, weights=np.ones(rows))
