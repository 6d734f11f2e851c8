"""Leaky integrate-and-fire cell dynamics, continuous and discrete.

The continuous model is the classic first-order membrane equation; its
closed-form trajectory (ignoring reset) is exposed for validation. The
discrete cells update as

    u0 = u + drive
    spike = 1 if u0 >= v_thresh else 0
    u'   = u0 * tau * (1 - spike)

where `drive` is the caller-supplied weighted input (synaptic sum plus
bias). A binary-output cell emits the spike itself; the analog-output
variant emits g(u0) for a configurable activation g while keeping the
identical spike-gated reset, so choosing g equal to the spike function
reproduces the binary cell exactly.

All step functions are pure: state in, state out, no hidden mutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ContinuousLifParams:
    """Membrane constants for the continuous model."""

    tau_m: float
    e_leak: float
    r_m: float
    u_reset: float
    u_thresh: float

    def __post_init__(self):
        if self.tau_m <= 0:
            raise ValueError(f"tau_m must be > 0, got {self.tau_m}")
        if self.u_reset >= self.u_thresh:
            raise ValueError("u_reset must be below u_thresh")


def closed_form_u(params: ContinuousLifParams, u0: float, i_e: float, t: float) -> float:
    """Membrane potential at time t under constant input current, no reset.

    u(t) = E + R*I + (u(0) - E - R*I) * exp(-t / tau_m)
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    steady = params.e_leak + params.r_m * i_e
    return steady + (u0 - steady) * math.exp(-t / params.tau_m)


def _spike(u0: np.ndarray, thresh: float) -> np.ndarray:
    return (u0 >= thresh).astype(np.float64)


def _identity(u0: np.ndarray, thresh: float) -> np.ndarray:
    return np.asarray(u0, dtype=np.float64)


def _relu(u0: np.ndarray, thresh: float) -> np.ndarray:
    return np.maximum(np.asarray(u0, dtype=np.float64), 0.0)


ACTIVATIONS: dict[str, Callable] = {
    "spike": _spike,
    "identity": _identity,
    "relu": _relu,
}


@dataclass(frozen=True)
class DiscreteCellConfig:
    """Discrete cell parameters; tau is the multiplicative leak in (0, 1]."""

    v_thresh: float = 0.5
    tau: float = 0.5
    mode: str = "lif"
    activation: str = "identity"

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if not math.isfinite(self.v_thresh):
            raise ValueError("v_thresh must be finite")
        if self.mode not in ("lif", "liaf"):
            raise ValueError(f"mode must be 'lif' or 'liaf', got {self.mode!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


def _check_drive(drive) -> np.ndarray:
    drive = np.asarray(drive, dtype=np.float64)
    if not np.isfinite(drive).all():
        raise ValueError("drive must be finite")
    return drive


def lif_step(u, drive, cfg: DiscreteCellConfig):
    """One binary-output step; returns (next state, spikes in {0, 1})."""
    if cfg.mode != "lif":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'lif'")
    drive = _check_drive(drive)
    u0 = np.asarray(u, dtype=np.float64) + drive
    spikes = _spike(u0, cfg.v_thresh)
    u_next = u0 * cfg.tau * (1.0 - spikes)
    return u_next, spikes


def liaf_step(u, drive, cfg: DiscreteCellConfig):
    """One analog-output step; returns (next state, g(u0)).

    The reset is gated by the same spike condition as the binary cell;
    only the emitted output goes through the analog activation.
    """
    if cfg.mode != "liaf":
        raise ValueError(f"config mode is {cfg.mode!r}, expected 'liaf'")
    drive = _check_drive(drive)
    u0 = np.asarray(u, dtype=np.float64) + drive
    spikes = _spike(u0, cfg.v_thresh)
    out = ACTIVATIONS[cfg.activation](u0, cfg.v_thresh)
    u_next = u0 * cfg.tau * (1.0 - spikes)
    return u_next, out


def rate_decode(train: np.ndarray) -> np.ndarray:
    """Per-neuron mean over the time axis of a (T, ...) train."""
    train = np.asarray(train, dtype=np.float64)
    if train.ndim < 1 or train.shape[0] < 1:
        raise ValueError("train must have at least one time step")
    return train.mean(axis=0)


def subthreshold_fixed_point(drive: float, tau: float) -> float:
    """Limit of u under constant drive when the cell never fires:
    u* = drive * tau / (1 - tau), valid for tau < 1."""
    if not 0.0 < tau < 1.0:
        raise ValueError("fixed point requires 0 < tau < 1")
    return drive * tau / (1.0 - tau)
