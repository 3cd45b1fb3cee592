"""Shared domain types for transceiver cache-aided networks.

A network has one base station (full library access), M cache-equipped
full-duplex relays and K users. All delivery-time bookkeeping is done in
exact rational arithmetic; floating point is confined to the channel /
linear-algebra layer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# Exact rational scalar used for cache sizes, breakpoints and NDT values.
# fractions.Fraction already guarantees lowest terms, a positive
# denominator and exact +,-,*,/ and comparisons.
Rational = Fraction


def as_rational(value: int | str | Rational) -> Rational:
    """Convert ``value`` to an exact rational.

    Accepts integers, Fractions and strings ("4/5", "0.8"). Decimal
    strings convert exactly from their decimal expansion. Binary floats
    are rejected: they silently misrepresent values like 0.8 and would
    poison exact breakpoint comparisons.
    """
    if isinstance(value, float):
        raise TypeError(
            "floats are not accepted for exact quantities; pass a string like '4/5' or '0.8'"
        )
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


class DegenerateChannel(Exception):
    """A channel draw hit a measure-zero degeneracy (vanishing determinant
    or alignment coefficient); the caller should redraw."""


def mod_bar(a: int, b: int) -> int:
    """Modified modular operator: a if a <= b, else a mod b; result in [1:b].

    Only defined for 1 <= a <= 2b - 1. Outside that window (in particular
    at a = 2b, where the plain modulus would leave the range [1:b]) the
    operator is rejected rather than guessed.
    """
    if b < 1:
        raise ValueError(f"modulus must be positive, got {b}")
    if not 1 <= a <= 2 * b - 1:
        raise ValueError(f"mod_bar requires 1 <= a <= 2b-1, got a={a}, b={b}")
    return a if a <= b else a - b


@dataclass(frozen=True)
class NetworkConfig:
    """Network instance: M relays, K users, N library files, fractional
    per-relay cache size mu (exact rational in [0, 1])."""

    M: int
    K: int
    N: int
    mu: Rational

    def __post_init__(self) -> None:
        for name in ("M", "K", "N"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        object.__setattr__(self, "mu", as_rational(self.mu))
        if self.N < self.M + self.K:
            # worst-case distinct demands need at least M + K files
            raise ValueError(f"need N >= M + K, got N={self.N}, M+K={self.M + self.K}")
        if not 0 <= self.mu <= 1:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")


@dataclass(frozen=True)
class DemandVector:
    """File requests of the K users followed by the M relays."""

    entries: tuple[int, ...]


def worst_case_demand(cfg: NetworkConfig) -> DemandVector:
    """Canonical worst-case request pattern: user u requests file u,
    relay r requests file K + r. All M + K requests are distinct."""
    return DemandVector(tuple(range(1, cfg.K + cfg.M + 1)))


@dataclass(frozen=True)
class ChannelSet:
    """Per-slot complex channel coefficients over T slots.

    f[t, m]    base station -> relay m
    g[t, k]    base station -> user k
    H[t, k, m] relay m -> user k

    Coefficients must be finite and nonzero (draws from a continuous
    distribution are nonzero with probability 1).
    """

    T: int
    f: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    H: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.T < 1:
            raise ValueError(f"T must be positive, got {self.T}")
        f = np.asarray(self.f, dtype=complex)
        g = np.asarray(self.g, dtype=complex)
        H = np.asarray(self.H, dtype=complex)
        if f.ndim != 2 or f.shape[0] != self.T:
            raise ValueError(f"f must be T x M, got shape {f.shape}")
        if g.ndim != 2 or g.shape[0] != self.T:
            raise ValueError(f"g must be T x K, got shape {g.shape}")
        if H.shape != (self.T, g.shape[1], f.shape[1]):
            raise ValueError(f"H must be T x K x M, got shape {H.shape}")
        for name, arr in (("f", f), ("g", g), ("H", H)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite coefficients")
            if np.any(arr == 0):
                raise ValueError(f"{name} contains zero coefficients")
        for arr in (f, g, H):
            arr.setflags(write=False)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "H", H)

    @property
    def M(self) -> int:
        return self.f.shape[1]

    @property
    def K(self) -> int:
        return self.g.shape[1]
