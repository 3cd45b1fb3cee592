"""Delivery schemes at the extremal cache sizes.

mu = 0: the relays hold nothing, the network degenerates to a single-
antenna broadcast channel with K + M receivers and the base station
unicasts every demand in turn (NDT K + M). mu = 1: every relay holds the
whole library, so base station plus relays act as one (M+1)-antenna
transmitter and zero-forcing beamforming serves user groups of size up to
M + 1 (NDT max{K/(M+1), 1}; relays need no delivery).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import ChannelSet, DegenerateChannel, NetworkConfig, Rational, worst_case_demand


@dataclass(frozen=True)
class TdmaSchedule:
    """Ordered unicast slots (receiver label, file index), one per demand."""

    slots: tuple[tuple[str, int], ...]
    ndt: Rational


def unicast_schedule(cfg: NetworkConfig) -> TdmaSchedule:
    """Serve the K + M worst-case demands one per slot; only valid at mu = 0."""
    if cfg.mu != 0:
        raise ValueError(f"unicast schedule applies at mu = 0 only, got mu = {cfg.mu}")
    demand = worst_case_demand(cfg).entries
    receivers = [f"ue{u}" for u in range(1, cfg.K + 1)] + [
        f"rn{r}" for r in range(1, cfg.M + 1)
    ]
    slots = tuple(zip(receivers, demand))
    return TdmaSchedule(slots=slots, ndt=Fraction(cfg.K + cfg.M))


@dataclass(frozen=True)
class MisoZfPlan:
    """Zero-forcing beamformers for the (M+1)-antenna virtual transmitter.

    Users are partitioned into ceil(K/(M+1)) groups; group g is served in
    slot g with beamformer matrix W[g] of shape (M+1, len(group)), column
    i nulling every other user of the group. slot_shares[g] is the
    fraction of a signaling unit the group needs (group size over M + 1),
    so the total NDT is max{K/(M+1), 1}.
    """

    groups: tuple[tuple[int, ...], ...]
    beamformers: tuple[np.ndarray, ...] = field(repr=False)
    slot_shares: tuple[Rational, ...]
    ndt: Rational
    nulling_residual: float


def _user_rows(ch: ChannelSet, t: int, group: tuple[int, ...]) -> np.ndarray:
    # row of user k against the antennas (base station, relay 1..M)
    return np.stack([np.concatenate(([ch.g[t, k - 1]], ch.H[t, k - 1, :])) for k in group])


def miso_zf_plan(ch: ChannelSet, cfg: NetworkConfig, tol: float = 1e-9) -> MisoZfPlan:
    """Compute per-group zero-forcing beamformers at mu = 1.

    Group g uses slot g of ``ch``. Beamformers are the pseudo-inverse of
    the stacked group rows (unit gain at the intended user, zero at the
    rest), with one refinement step to push the nulling residual to the
    rounding floor. A group whose channel matrix has a relative singular
    value below tol raises DegenerateChannel.
    """
    if cfg.mu != 1:
        raise ValueError(f"MISO zero-forcing applies at mu = 1 only, got mu = {cfg.mu}")
    if ch.M != cfg.M or ch.K != cfg.K:
        raise ValueError("channel dimensions do not match the configuration")
    size = cfg.M + 1
    groups = tuple(
        tuple(range(start, min(start + size, cfg.K + 1)))
        for start in range(1, cfg.K + 1, size)
    )
    if ch.T < len(groups):
        raise ValueError(f"need at least {len(groups)} slots, got T = {ch.T}")

    beamformers = []
    residual = 0.0
    for t, group in enumerate(groups):
        C = _user_rows(ch, t, group)
        sv = np.linalg.svd(C, compute_uv=False)
        if sv[-1] < tol * sv[0]:
            raise DegenerateChannel(f"group {group} channel matrix is near rank-deficient")
        W = np.linalg.pinv(C)
        W = W + np.linalg.pinv(C) @ (np.eye(len(group)) - C @ W)
        gains = C @ W
        off = gains - np.diag(np.diag(gains))
        residual = max(residual, float(np.abs(off).max() / np.abs(np.diag(gains)).min()))
        beamformers.append(W)

    shares = tuple(Fraction(len(g), size) for g in groups)
    ndt = max(Fraction(cfg.K, size), Fraction(1))
    return MisoZfPlan(
        groups=groups,
        beamformers=tuple(beamformers),
        slot_shares=shares,
        ndt=ndt,
        nulling_residual=residual,
    )
