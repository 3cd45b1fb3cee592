"""Randomized numerical verification of the delivery schemes.

Seeded Monte Carlo over i.i.d. complex Gaussian channels: solve the
precoders, assemble effective receive matrices, check zero-forcing and
alignment residuals plus subspace ranks, decode noiselessly, and account
DoF/NDT. Every trial derives its RNG stream from (seed, trial, attempt),
so serial and parallel execution, and repeated runs, agree exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .corner import miso_zf_plan, unicast_schedule
from .model import ChannelSet, DegenerateChannel, NetworkConfig, Rational
from .scheme_m1k3 import (
    DENB_SYMBOLS,
    T_SLOTS,
    TRANSMITTED_SYMBOLS,
    SymbolId,
    alignment_graph,
    effective_channel_matrix,
    rn_cache_cancel,
    solve_precoders,
    symbol_layout,
    uncached_unknowns,
    zf_assignment,
)

# Pass thresholds for a verification trial. Rank decisions use a cut far
# below any genuine singular value but far above the rounding floor; the
# gap requirement rejects any matrix whose spectrum does not cleanly
# separate there.
ZF_RESIDUAL_MAX = 1e-10
ALIGNMENT_RESIDUAL_MAX = 1e-8
DECODE_ERROR_MAX = 1e-6
MIN_SV_GAP = 1e6
RANK_REL_TOL = 1e-12
_MAX_REDRAWS = 8


class VerificationFailure(Exception):
    """A verification run had failing trials; carries the aggregate report
    and the first failing trial's diagnostics."""

    def __init__(self, message: str, report: "VerificationReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class SubspaceReport:
    """Rank/residual diagnostics of one receiver's effective matrix."""

    receiver: str
    desired_rank: int
    interference_rank: int
    total_rank: int
    zf_residual: float
    alignment_residual: float
    singular_values: tuple[float, ...]


@dataclass(frozen=True)
class VerificationReport:
    """Aggregate outcome of a Monte Carlo verification run."""

    ue_reports: tuple[SubspaceReport, ...]
    rn_reports: tuple[SubspaceReport, ...]
    decode_max_error: float
    ndt: Rational
    per_ue_dof: Rational
    rn_dof: Rational
    sum_dof: Rational
    trials: int
    failures: int
    redraws: int


@dataclass(frozen=True)
class RateEstimate:
    """Finite-SNR achievable rate of one receiver and the slope of rate
    versus log2 SNR fitted across all requested SNR points."""

    receiver: str
    snr_db: float
    rate: float
    fitted_slope: float


def draw_channels(seed, T: int, M: int, K: int) -> ChannelSet:
    """Seeded i.i.d. CN(0,1) channels, independent across slots.

    Draw order is fixed (f, then g, then H, real parts before imaginary)
    so a seed fully determines the set. ``seed`` may be an int or a tuple
    of ints.
    """
    if T < 1 or M < 1 or K < 1:
        raise ValueError("T, M and K must be positive")
    rng = np.random.default_rng(seed)

    def cn(shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    return ChannelSet(T=T, f=cn((T, M)), g=cn((T, K)), H=cn((T, K, M)))


def rank_with_gap(matrix: np.ndarray, tol: float) -> tuple[int, float]:
    """Numerical rank and the spectral gap of the rank decision.

    rank counts singular values >= tol * largest; gap_ratio is smallest
    kept over largest discarded (inf when nothing is discarded). A small
    gap means the cut fell inside a singular value cluster and the rank
    decision should not be trusted.
    """
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        raise ValueError("matrix must be nonempty")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return 0, math.inf
    rank = int(np.count_nonzero(s >= tol * s[0]))
    if rank in (0, len(s)) or s[rank] == 0.0:
        return rank, math.inf
    return rank, float(s[rank - 1] / s[rank])


def _cn_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def _interference_basis(intf: np.ndarray, dim: int) -> np.ndarray:
    u, _, _ = np.linalg.svd(intf)
    return u[:, :dim]


def _project_out(basis: np.ndarray, arr: np.ndarray) -> np.ndarray:
    return arr - basis @ (basis.conj().T @ arr)


def _solve_m1k3_with_redraws(seed, trial: int, tol: float):
    for attempt in range(_MAX_REDRAWS + 1):
        ch = draw_channels(_key(seed, trial, attempt), T_SLOTS, 1, 3)
        try:
            return ch, solve_precoders(ch, tol), attempt
        except DegenerateChannel:
            continue
    raise VerificationFailure(
        f"trial {trial}: {_MAX_REDRAWS} consecutive degenerate channel draws"
    )


def _key(seed, *extra: int) -> tuple[int, ...]:
    base = seed if isinstance(seed, tuple) else (seed,)
    return base + extra


def verify_m1k3(seed, trials: int, tol: float = 1e-9) -> VerificationReport:
    """Monte Carlo verification of the mu = 4/5, M = 1, K = 3 scheme.

    Per trial: draw channels (redrawing on degeneracy), solve precoders,
    then require at every user a rank-5 desired subspace, rank-3 aligned
    interference, full rank 8 overall, zero-forced columns below
    ZF_RESIDUAL_MAX, alignment groups colinear below
    ALIGNMENT_RESIDUAL_MAX, and noiseless decoding of all five desired
    symbols below DECODE_ERROR_MAX; the relay must recover eta_{4,5}
    from its rank-4 post-cancellation system. Raises VerificationFailure
    (report attached) if any trial fails.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    layout = symbol_layout()
    zf = zf_assignment()
    graph = alignment_graph()
    col = {s: n for n, s in enumerate(TRANSMITTED_SYMBOLS)}
    desired_cols = {
        k: [col[SymbolId(k, j)] for j in range(1, 6)] for k in (1, 2, 3)
    }
    rn_unknowns = uncached_unknowns()
    eta45_pos = rn_unknowns.index(SymbolId(4, 5))

    failures = 0
    redraws = 0
    first_failure: str | None = None
    decode_max = 0.0
    zf_max = {k: 0.0 for k in (1, 2, 3)}
    align_max = {k: 0.0 for k in (1, 2, 3)}
    first_ranks: dict = {}
    first_svs: dict = {}

    for trial in range(trials):
        ch, plan, attempts = _solve_m1k3_with_redraws(seed, trial, tol)
        redraws += attempts
        sym_rng = np.random.default_rng(_key(seed, trial, attempts, 1))
        syms = _cn_vector(sym_rng, len(TRANSMITTED_SYMBOLS))
        problems: list[str] = []

        for k in (1, 2, 3):
            E = effective_channel_matrix(plan, ch, f"ue{k}")
            des = desired_cols[k]
            intf = [n for n in range(E.shape[1]) if n not in des]
            d_rank, _ = rank_with_gap(E[:, des], RANK_REL_TOL)
            i_rank, i_gap = rank_with_gap(E[:, intf], RANK_REL_TOL)
            t_rank, _ = rank_with_gap(E, RANK_REL_TOL)
            if (d_rank, i_rank, t_rank) != (5, 3, 8):
                problems.append(f"ue{k} ranks ({d_rank},{i_rank},{t_rank}) != (5,3,8)")
            if i_gap < MIN_SV_GAP:
                problems.append(f"ue{k} interference sv gap {i_gap:.3e} < {MIN_SV_GAP:.0e}")

            peak = np.abs(E).max()
            zf_res = float(max(np.abs(E[:, col[s]]).max() for s in zf.at_ue(k)) / peak)
            zf_max[k] = max(zf_max[k], zf_res)
            if zf_res > ZF_RESIDUAL_MAX:
                problems.append(f"ue{k} ZF residual {zf_res:.3e}")

            align_res = 0.0
            for group in graph.groups_at_ue(k):
                sv = np.linalg.svd(E[:, [col[s] for s in group]], compute_uv=False)
                align_res = max(align_res, float(sv[1] / sv[0]))
            align_max[k] = max(align_max[k], align_res)
            if align_res > ALIGNMENT_RESIDUAL_MAX:
                problems.append(f"ue{k} alignment residual {align_res:.3e}")

            basis = _interference_basis(E[:, intf], 3)
            sol, *_ = np.linalg.lstsq(
                _project_out(basis, E[:, des]), _project_out(basis, E @ syms), rcond=None
            )
            err = float(np.abs(sol - syms[des]).max() / np.abs(syms[des]).max())
            decode_max = max(decode_max, err)
            if err > DECODE_ERROR_MAX:
                problems.append(f"ue{k} decode error {err:.3e}")

            if trial == 0:
                first_ranks[f"ue{k}"] = (d_rank, i_rank, t_rank)
                first_svs[f"ue{k}"] = tuple(
                    float(x) for x in np.linalg.svd(E, compute_uv=False)
                )

        rn_full = effective_channel_matrix(plan, ch, "rn")
        cancelled = rn_cache_cancel(rn_full, layout)
        rn_rank, _ = rank_with_gap(cancelled, RANK_REL_TOL)
        if rn_rank != 4:
            problems.append(f"rn post-cancellation rank {rn_rank} != 4")
        denb_syms = syms[[col[s] for s in DENB_SYMBOLS]]
        known = [n for n, s in enumerate(DENB_SYMBOLS) if s in layout.rn_cached]
        y = rn_full @ denb_syms - rn_full[:, known] @ denb_syms[known]
        sol, *_ = np.linalg.lstsq(cancelled, y, rcond=None)
        truth = syms[col[SymbolId(4, 5)]]
        err = float(abs(sol[eta45_pos] - truth) / abs(truth))
        decode_max = max(decode_max, err)
        if err > DECODE_ERROR_MAX:
            problems.append(f"rn decode error {err:.3e}")
        if trial == 0:
            first_ranks["rn"] = (rn_rank, 0, rn_rank)
            first_svs["rn"] = tuple(float(x) for x in np.linalg.svd(cancelled, compute_uv=False))

        if problems:
            failures += 1
            if first_failure is None:
                first_failure = f"trial {trial}: " + "; ".join(problems)

    ue_reports = tuple(
        SubspaceReport(
            receiver=f"ue{k}",
            desired_rank=first_ranks[f"ue{k}"][0],
            interference_rank=first_ranks[f"ue{k}"][1],
            total_rank=first_ranks[f"ue{k}"][2],
            zf_residual=zf_max[k],
            alignment_residual=align_max[k],
            singular_values=first_svs[f"ue{k}"],
        )
        for k in (1, 2, 3)
    )
    rn_report = SubspaceReport(
        receiver="rn1",
        desired_rank=first_ranks["rn"][0],
        interference_rank=first_ranks["rn"][1],
        total_rank=first_ranks["rn"][2],
        zf_residual=0.0,
        alignment_residual=0.0,
        singular_values=first_svs["rn"],
    )
    report = VerificationReport(
        ue_reports=ue_reports,
        rn_reports=(rn_report,),
        decode_max_error=decode_max,
        ndt=Fraction(8, 5),
        per_ue_dof=Fraction(5, 8),
        rn_dof=Fraction(1, 8),
        sum_dof=Fraction(2),
        trials=trials,
        failures=failures,
        redraws=redraws,
    )
    if failures:
        raise VerificationFailure(first_failure or "verification failed", report)
    return report


def _verify_unicast(seed, trials: int, cfg: NetworkConfig) -> VerificationReport:
    schedule = unicast_schedule(cfg)
    decode_max = 0.0
    first_svs: dict[str, tuple[float, ...]] = {}
    for trial in range(trials):
        ch = draw_channels(_key(seed, trial, 0), len(schedule.slots), cfg.M, cfg.K)
        sym_rng = np.random.default_rng(_key(seed, trial, 0, 1))
        syms = _cn_vector(sym_rng, len(schedule.slots))
        for t, (receiver, _file) in enumerate(schedule.slots):
            if receiver.startswith("ue"):
                coeff = ch.g[t, int(receiver[2:]) - 1]
            else:
                coeff = ch.f[t, int(receiver[2:]) - 1]
            err = float(abs((coeff * syms[t]) / coeff - syms[t]) / abs(syms[t]))
            decode_max = max(decode_max, err)
            if trial == 0:
                first_svs[receiver] = (float(abs(coeff)),)
    make = lambda r: SubspaceReport(r, 1, 0, 1, 0.0, 0.0, first_svs[r])
    return VerificationReport(
        ue_reports=tuple(make(f"ue{u}") for u in range(1, cfg.K + 1)),
        rn_reports=tuple(make(f"rn{r}") for r in range(1, cfg.M + 1)),
        decode_max_error=decode_max,
        ndt=schedule.ndt,
        per_ue_dof=Fraction(1, cfg.K + cfg.M),
        rn_dof=Fraction(1, cfg.K + cfg.M),
        sum_dof=Fraction(1),
        trials=trials,
        failures=0,
        redraws=0,
    )


def _verify_miso(seed, trials: int, cfg: NetworkConfig, tol: float):
    n_groups = -(-cfg.K // (cfg.M + 1))
    failures = 0
    redraws = 0
    first_failure: str | None = None
    decode_max = 0.0
    residual_by_ue = {k: 0.0 for k in range(1, cfg.K + 1)}
    first_svs: dict[int, tuple[float, ...]] = {}

    for trial in range(trials):
        plan = None
        for attempt in range(_MAX_REDRAWS + 1):
            ch = draw_channels(_key(seed, trial, attempt), n_groups, cfg.M, cfg.K)
            try:
                plan = miso_zf_plan(ch, cfg, tol)
                break
            except DegenerateChannel:
                redraws += 1
        if plan is None:
            raise VerificationFailure(
                f"trial {trial}: {_MAX_REDRAWS} consecutive degenerate channel draws"
            )
        sym_rng = np.random.default_rng(_key(seed, trial, attempt, 1))
        problems: list[str] = []
        if plan.nulling_residual > ZF_RESIDUAL_MAX:
            problems.append(f"nulling residual {plan.nulling_residual:.3e}")
        for t, (group, W) in enumerate(zip(plan.groups, plan.beamformers)):
            rows = np.stack(
                [np.concatenate(([ch.g[t, k - 1]], ch.H[t, k - 1, :])) for k in group]
            )
            gains = rows @ W
            syms = _cn_vector(sym_rng, len(group))
            y = rows @ (W @ syms)
            est = y / np.diag(gains)
            err = float(np.abs(est - syms).max() / np.abs(syms).max())
            decode_max = max(decode_max, err)
            if err > DECODE_ERROR_MAX:
                problems.append(f"group {group} decode error {err:.3e}")
            off = gains - np.diag(np.diag(gains))
            scale = float(np.abs(np.diag(gains)).min())
            for i, k in enumerate(group):
                res = float(np.abs(off[i]).max() / scale)
                residual_by_ue[k] = max(residual_by_ue[k], res)
                if trial == 0:
                    first_svs[k] = tuple(
                        float(x) for x in np.linalg.svd(rows, compute_uv=False)
                    )
        if problems:
            failures += 1
            if first_failure is None:
                first_failure = f"trial {trial}: " + "; ".join(problems)

    ue_reports = tuple(
        SubspaceReport(f"ue{k}", 1, 0, 1, residual_by_ue[k], 0.0, first_svs[k])
        for k in range(1, cfg.K + 1)
    )
    served = min(cfg.M + 1, cfg.K)
    report = VerificationReport(
        ue_reports=ue_reports,
        rn_reports=(),
        decode_max_error=decode_max,
        ndt=max(Fraction(cfg.K, cfg.M + 1), Fraction(1)),
        per_ue_dof=Fraction(served, cfg.K),
        rn_dof=Fraction(0),
        sum_dof=Fraction(served),
        trials=trials,
        failures=failures,
        redraws=redraws,
    )
    if failures:
        raise VerificationFailure(first_failure or "verification failed", report)
    return report


def verify_corner(seed, trials: int, cfg: NetworkConfig, tol: float = 1e-9) -> VerificationReport:
    """Verify the extremal-cache schemes: unicasting at mu = 0 (NDT K + M,
    decoding is a scalar division) or MISO zero-forcing at mu = 1 (NDT
    max{K/(M+1), 1}, cross-user gains must vanish to tolerance)."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if cfg.mu == 0:
        return _verify_unicast(seed, trials, cfg)
    if cfg.mu == 1:
        return _verify_miso(seed, trials, cfg, tol)
    raise ValueError(f"corner verification needs mu in {{0, 1}}, got {cfg.mu}")


def finite_snr_rates(seed, snr_db_list: list[float], trials: int) -> list[RateEstimate]:
    """Finite-SNR rates of the M = 1, K = 3 scheme and their DoF slopes.

    For each channel draw, each user's rate is the log-det mutual
    information of its interference-projected 5x5 system at symbol power
    P; the relay's is the scalar-channel rate of eta_{4,5} after cache
    cancellation and projection. Rates are averaged over ``trials``
    draws and, per receiver, a least-squares slope of rate versus
    log2(P) is fitted across all SNR points. Requires at least 3 SNR
    points spanning at least 20 dB.
    """
    if len(snr_db_list) < 3:
        raise ValueError("need at least 3 SNR points")
    if max(snr_db_list) - min(snr_db_list) < 20:
        raise ValueError("SNR points must span at least 20 dB")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")

    snrs = [float(x) for x in snr_db_list]
    powers = [10.0 ** (x / 10.0) for x in snrs]
    receivers = ["ue1", "ue2", "ue3", "rn"]
    totals = {r: np.zeros(len(snrs)) for r in receivers}
    layout = symbol_layout()
    col = {s: n for n, s in enumerate(TRANSMITTED_SYMBOLS)}
    eta45_pos = uncached_unknowns().index(SymbolId(4, 5))

    for trial in range(trials):
        ch, plan, _ = _solve_m1k3_with_redraws(seed, trial, 1e-9)
        for k in (1, 2, 3):
            E = effective_channel_matrix(plan, ch, f"ue{k}")
            des = [col[SymbolId(k, j)] for j in range(1, 6)]
            intf = [n for n in range(E.shape[1]) if n not in des]
            u, _, _ = np.linalg.svd(E[:, intf])
            geff = u[:, 3:].conj().T @ E[:, des]
            gram = geff @ geff.conj().T
            for i, p in enumerate(powers):
                _, logdet = np.linalg.slogdet(np.eye(5) + p * gram)
                totals[f"ue{k}"][i] += logdet / math.log(2) / T_SLOTS
        cancelled = rn_cache_cancel(effective_channel_matrix(plan, ch, "rn"), layout)
        others = [n for n in range(4) if n != eta45_pos]
        u, _, _ = np.linalg.svd(cancelled[:, others])
        geff = u[:, 3:].conj().T @ cancelled[:, eta45_pos]
        gain = float(np.real(geff.conj() @ geff))
        for i, p in enumerate(powers):
            totals["rn"][i] += math.log2(1.0 + p * gain) / T_SLOTS

    x = np.array([math.log2(p) for p in powers])
    estimates = []
    for r in receivers:
        y = totals[r] / trials
        slope = float(np.sum((x - x.mean()) * (y - y.mean())) / np.sum((x - x.mean()) ** 2))
        for i, snr in enumerate(snrs):
            estimates.append(RateEstimate(r, snr, float(y[i]), slope))
    return estimates
