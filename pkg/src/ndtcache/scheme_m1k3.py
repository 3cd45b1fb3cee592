"""Combined zero-forcing / subspace-alignment delivery scheme for one relay
and three users at cache size mu = 4/5.

Every file is split into 5 symbols; the relay caches the first 4 symbols of
every file. With users 1..3 requesting files 1..3 and the relay requesting
file 4, the 16 symbols that need the air are the 15 symbols of files 1..3
plus the relay's single uncached symbol eta_{4,5}. Per slot, scalar
precoders (nu at the base station, beta at the relay) are chosen so that at
each user

  * three interfering symbols are zero-forced outright, and
  * the remaining eight interfering symbols collapse into three alignment
    groups (one per chain layer), i.e. three receive dimensions,

leaving 5 clean dimensions for the 5 desired symbols inside T = 8 slots.
This module builds the fixed combinatorial structure (symbol layout, ZF
map, alignment graph) and solves the per-slot precoders.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ChannelSet, DegenerateChannel, mod_bar

T_SLOTS = 8
NUM_FILES = 4
SYMBOLS_PER_FILE = 5


def _mbar3(a: int) -> int:
    return mod_bar(a, 3)


@dataclass(frozen=True, order=True)
class SymbolId:
    """Symbol j of file i, written eta_{i,j}."""

    file: int
    index: int

    def __post_init__(self) -> None:
        if not 1 <= self.file <= NUM_FILES:
            raise ValueError(f"file must be in [1:{NUM_FILES}], got {self.file}")
        if not 1 <= self.index <= SYMBOLS_PER_FILE:
            raise ValueError(f"index must be in [1:{SYMBOLS_PER_FILE}], got {self.index}")


# Canonical column orders used by every matrix in this module.
TRANSMITTED_SYMBOLS: tuple[SymbolId, ...] = tuple(
    SymbolId(i, j) for i in range(1, 4) for j in range(1, 6)
) + (SymbolId(4, 5),)
DENB_SYMBOLS: tuple[SymbolId, ...] = tuple(s for s in TRANSMITTED_SYMBOLS if s.index != 4)
RN_SYMBOLS: tuple[SymbolId, ...] = tuple(
    s for s in TRANSMITTED_SYMBOLS if s.file != 4 and s.index != 5
)
_COL = {s: n for n, s in enumerate(TRANSMITTED_SYMBOLS)}


@dataclass(frozen=True)
class SymbolLayout:
    """Which symbols each transmitter sends and which the relay caches."""

    denb_transmits: frozenset[SymbolId]
    rn_transmits: frozenset[SymbolId]
    rn_cached: frozenset[SymbolId]


def symbol_layout() -> SymbolLayout:
    """Fixed symbol placement: the base station sends the 13 symbols it
    must (indices 1,2,3,5 of files 1..3 and eta_{4,5}), the relay sends
    the 12 cached symbols of files 1..3 (indices 1..4), and the cache
    holds indices 1..4 of all four files (fraction 4/5 of each file)."""
    cached = frozenset(SymbolId(i, j) for i in range(1, 5) for j in range(1, 5))
    return SymbolLayout(
        denb_transmits=frozenset(DENB_SYMBOLS),
        rn_transmits=frozenset(RN_SYMBOLS),
        rn_cached=cached,
    )


@dataclass(frozen=True)
class ZfMap:
    """For each user k, the three symbols zero-forced at user k."""

    by_ue: tuple[frozenset[SymbolId], ...]

    def at_ue(self, k: int) -> frozenset[SymbolId]:
        if not 1 <= k <= 3:
            raise ValueError(f"user index must be in [1:3], got {k}")
        return self.by_ue[k - 1]

    def ue_for(self, symbol: SymbolId) -> int:
        for k, group in enumerate(self.by_ue, start=1):
            if symbol in group:
                return k
        raise KeyError(f"{symbol} is not zero-forced at any user")


def zf_assignment() -> ZfMap:
    """Zero-forcing map: at user k, symbols 1 and 2 of file (k+1) and
    symbol 3 of file (k+2), file indices wrapped into [1:3]."""
    by_ue = tuple(
        frozenset(
            {
                SymbolId(_mbar3(k + 1), 1),
                SymbolId(_mbar3(k + 1), 2),
                SymbolId(_mbar3(k + 2), 3),
            }
        )
        for k in (1, 2, 3)
    )
    return ZfMap(by_ue)


@dataclass(frozen=True)
class AlignmentGraph:
    """Per-user alignment groups, one per chain layer.

    At user k the eight non-zero-forced interference symbols split into
    layer 1 = {eta_{4,5}, eta_{k+1,4}} (2 symbols), layer 2 =
    {eta_{k+2,4}, eta_{k+2,2}, eta_{k+1,5}} and layer 3 =
    {eta_{k+2,5}, eta_{k+2,1}, eta_{k+1,3}} (3 symbols each); the index-4
    symbols link layers 1 and 2 across users, the index-5 symbols layers
    2 and 3.
    """

    layers_by_ue: tuple[tuple[tuple[SymbolId, ...], ...], ...]

    def groups_at_ue(self, k: int) -> tuple[tuple[SymbolId, ...], ...]:
        if not 1 <= k <= 3:
            raise ValueError(f"user index must be in [1:3], got {k}")
        return self.layers_by_ue[k - 1]


def alignment_graph() -> AlignmentGraph:
    layers = []
    for k in (1, 2, 3):
        nxt, nnxt = _mbar3(k + 1), _mbar3(k + 2)
        layers.append(
            (
                (SymbolId(4, 5), SymbolId(nxt, 4)),
                (SymbolId(nnxt, 4), SymbolId(nnxt, 2), SymbolId(nxt, 5)),
                (SymbolId(nnxt, 5), SymbolId(nnxt, 1), SymbolId(nxt, 3)),
            )
        )
    return AlignmentGraph(tuple(layers))


@dataclass(frozen=True)
class PrecoderPlan:
    """Solved per-slot precoders for all 16 transmitted symbols.

    nu[t, c] and beta[t, c] hold the base-station and relay precoders of
    TRANSMITTED_SYMBOLS[c] at slot t, already normalized: the raw chain
    solution was multiplied by slot_scale[t] (one positive factor shared
    by every symbol of slot t, which leaves all per-slot conditions
    untouched) and then by scale[c] (one positive factor per symbol,
    uniform across slots). Dividing both back out recovers the raw
    solution. Relay-only symbols (index 4) have nu identically zero,
    base-station-only symbols (index 5) have beta identically zero.
    """

    nu: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    scale: np.ndarray = field(repr=False)
    slot_scale: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        nu = np.asarray(self.nu, dtype=complex)
        beta = np.asarray(self.beta, dtype=complex)
        scale = np.asarray(self.scale, dtype=float)
        slot_scale = np.asarray(self.slot_scale, dtype=float)
        n = len(TRANSMITTED_SYMBOLS)
        if nu.shape != (T_SLOTS, n) or beta.shape != (T_SLOTS, n):
            raise ValueError(f"nu and beta must be {T_SLOTS} x {n}")
        if scale.shape != (n,) or np.any(scale <= 0):
            raise ValueError("scale must hold one positive factor per symbol")
        if slot_scale.shape != (T_SLOTS,) or np.any(slot_scale <= 0):
            raise ValueError("slot_scale must hold one positive factor per slot")
        rn_set, denb_set = frozenset(RN_SYMBOLS), frozenset(DENB_SYMBOLS)
        for s in TRANSMITTED_SYMBOLS:
            if s not in rn_set and np.any(beta[:, _COL[s]] != 0):
                raise ValueError(f"{s} is not relay-transmitted but has nonzero beta")
            if s not in denb_set and np.any(nu[:, _COL[s]] != 0):
                raise ValueError(f"{s} is not base-station-transmitted but has nonzero nu")
        for arr in (nu, beta, scale, slot_scale):
            arr.setflags(write=False)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "slot_scale", slot_scale)

    def nu_for(self, symbol: SymbolId) -> np.ndarray:
        return self.nu[:, _COL[symbol]]

    def beta_for(self, symbol: SymbolId) -> np.ndarray:
        return self.beta[:, _COL[symbol]]

    def scale_for(self, symbol: SymbolId) -> float:
        return float(self.scale[_COL[symbol]])

    def raw_nu_for(self, symbol: SymbolId) -> np.ndarray:
        """Chain solution before any normalization."""
        return self.nu_for(symbol) / (self.slot_scale * self.scale_for(symbol))

    def raw_beta_for(self, symbol: SymbolId) -> np.ndarray:
        return self.beta_for(symbol) / (self.slot_scale * self.scale_for(symbol))


def _require_m1k3(ch: ChannelSet) -> None:
    if (ch.T, ch.M, ch.K) != (T_SLOTS, 1, 3):
        raise ValueError(
            f"scheme needs T={T_SLOTS}, M=1, K=3 channels, got T={ch.T}, M={ch.M}, K={ch.K}"
        )


def solve_precoders(ch: ChannelSet, tol: float = 1e-9) -> PrecoderPlan:
    """Solve all per-slot precoders of the mu = 4/5 scheme.

    Each slot is independent. Writing g_k, h_k for the slot's user-k
    coefficients from base station and relay:

    1. nu of eta_{4,5} is fixed to the product
       j13*j23*j33 * g1*g2*g3 * h1*h2*h3 with
       j13 = g2 h3 - g3 h2, j23 = g3 h1 - g1 h3, j33 = g1 h2 - g2 h1.
    2. Layer-1 alignment at user k pins the relay precoder of
       eta_{k+1,4} to nu_{4,5} g_k / h_k.
    3. Layer 2 at user k pins nu of eta_{k+1,5} to beta_{k+2,4} h_k / g_k
       and determines (nu, beta) of eta_{k+2,2} from the 2x2 system that
       pairs the layer equality with that symbol's ZF condition.
    4. Layer 3 likewise determines (nu, beta) of eta_{k+2,1} and of
       eta_{k+1,3} against the now-known nu of the index-5 symbols.
    5. Normalize. The raw chain inherits the product nu_{4,5}, whose
       magnitude swings over many orders across slots, so first every
       slot is rescaled by a common positive factor (the whole chain is
       linear in nu_{4,5}[t], hence all per-slot ZF and alignment
       equalities survive verbatim), then each symbol gets one positive
       factor uniform across slots so its peak precoder magnitude is 1.
       The per-symbol step keeps zero-forced entries exactly zero and
       alignment groups colinear, though the literal per-slot equalities
       then only hold for the raw values (see raw_nu_for/raw_beta_for).

    The 2x2 determinants all coincide with +-j terms, so a j term with
    magnitude below tol (relative to the squared slot channel scale)
    raises DegenerateChannel; so does a channel coefficient below tol
    relative to the slot scale, since steps 2-3 divide by g_k and h_k.
    """
    _require_m1k3(ch)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    g = {k: ch.g[:, k - 1] for k in (1, 2, 3)}
    h = {k: ch.H[:, k - 1, 0] for k in (1, 2, 3)}
    j13 = g[2] * h[3] - g[3] * h[2]
    j23 = g[3] * h[1] - g[1] * h[3]
    j33 = g[1] * h[2] - g[2] * h[1]
    # determinant of the (alignment at UE a, ZF at UE b) system
    det = {(1, 2): j33, (2, 3): j13, (3, 1): j23,
           (2, 1): -j33, (3, 2): -j13, (1, 3): -j23}

    slot_scale = np.max(np.abs(np.concatenate([ch.g, ch.H[:, :, 0]], axis=1)), axis=1)
    for name, j in (("j13", j13), ("j23", j23), ("j33", j33)):
        if np.any(np.abs(j) < tol * slot_scale**2):
            raise DegenerateChannel(f"{name} below tolerance in at least one slot")
    for k in (1, 2, 3):
        if np.any(np.abs(g[k]) < tol * slot_scale) or np.any(np.abs(h[k]) < tol * slot_scale):
            raise DegenerateChannel(f"user-{k} coefficient below tolerance in at least one slot")

    n = len(TRANSMITTED_SYMBOLS)
    nu = np.zeros((T_SLOTS, n), dtype=complex)
    beta = np.zeros((T_SLOTS, n), dtype=complex)

    nu45 = j13 * j23 * j33 * g[1] * g[2] * g[3] * h[1] * h[2] * h[3]
    nu[:, _COL[SymbolId(4, 5)]] = nu45
    for k in (1, 2, 3):
        beta[:, _COL[SymbolId(_mbar3(k + 1), 4)]] = nu45 * g[k] / h[k]
    for k in (1, 2, 3):
        nu[:, _COL[SymbolId(_mbar3(k + 1), 5)]] = (
            beta[:, _COL[SymbolId(_mbar3(k + 2), 4)]] * h[k] / g[k]
        )
    for k in (1, 2, 3):
        i2 = _mbar3(k + 2)
        b = _mbar3(k + 1)  # ZF user of eta_{i2,1} and eta_{i2,2}
        target2 = beta[:, _COL[SymbolId(i2, 4)]] * h[k]
        nu[:, _COL[SymbolId(i2, 2)]] = target2 * h[b] / det[(k, b)]
        beta[:, _COL[SymbolId(i2, 2)]] = -target2 * g[b] / det[(k, b)]

        target3 = nu[:, _COL[SymbolId(i2, 5)]] * g[k]
        nu[:, _COL[SymbolId(i2, 1)]] = target3 * h[b] / det[(k, b)]
        beta[:, _COL[SymbolId(i2, 1)]] = -target3 * g[b] / det[(k, b)]

        i3 = _mbar3(k + 1)
        b3 = _mbar3(k + 2)  # ZF user of eta_{i3,3}
        nu[:, _COL[SymbolId(i3, 3)]] = target3 * h[b3] / det[(k, b3)]
        beta[:, _COL[SymbolId(i3, 3)]] = -target3 * g[b3] / det[(k, b3)]

    magnitudes = np.maximum(np.abs(nu), np.abs(beta))
    slot_peak = magnitudes.max(axis=1)
    if np.any(slot_peak == 0):
        raise DegenerateChannel("a slot received an identically zero precoder set")
    slot_scale = 1.0 / slot_peak
    nu *= slot_scale[:, None]
    beta *= slot_scale[:, None]
    peak = np.maximum(np.abs(nu), np.abs(beta)).max(axis=0)
    if np.any(peak == 0):
        raise DegenerateChannel("a symbol received an identically zero precoder")
    scale = 1.0 / peak
    return PrecoderPlan(nu=nu * scale, beta=beta * scale, scale=scale, slot_scale=slot_scale)


def effective_channel_matrix(plan: PrecoderPlan, ch: ChannelSet, receiver: str) -> np.ndarray:
    """Effective receive matrix over the T = 8 slots.

    For receiver "ue1".."ue3": an 8 x 16 matrix whose column for symbol x
    is g_k[t] nu_x[t] + h_k[t] beta_x[t], columns in TRANSMITTED_SYMBOLS
    order. For "rn": the 8 x 13 matrix f_1[t] nu_x[t] over DENB_SYMBOLS
    (the relay hears only the base station).
    """
    _require_m1k3(ch)
    if receiver == "rn":
        cols = [_COL[s] for s in DENB_SYMBOLS]
        return ch.f[:, 0:1] * plan.nu[:, cols]
    if receiver in ("ue1", "ue2", "ue3"):
        k = int(receiver[2])
        return ch.g[:, k - 1 : k] * plan.nu + ch.H[:, k - 1, 0:1] * plan.beta
    raise ValueError(f"receiver must be 'ue1'..'ue3' or 'rn', got {receiver!r}")


def rn_cache_cancel(matrix: np.ndarray, layout: SymbolLayout) -> np.ndarray:
    """Strip cached-symbol columns from the relay's 8 x 13 receive matrix.

    The relay knows every transmitted symbol with index <= 4, subtracts
    their contribution, and is left with the 8 x 4 system over the
    uncached unknowns {eta_{1,5}, eta_{2,5}, eta_{3,5}, eta_{4,5}}.
    """
    matrix = np.asarray(matrix)
    if matrix.shape != (T_SLOTS, len(DENB_SYMBOLS)):
        raise ValueError(f"expected the {T_SLOTS} x {len(DENB_SYMBOLS)} relay matrix")
    keep = [n for n, s in enumerate(DENB_SYMBOLS) if s not in layout.rn_cached]
    return matrix[:, keep]


def uncached_unknowns() -> tuple[SymbolId, ...]:
    """Column order of the post-cancellation relay system."""
    layout = symbol_layout()
    return tuple(s for s in DENB_SYMBOLS if s not in layout.rn_cached)
