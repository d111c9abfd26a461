"""Per-clock cluster-factory success probabilities and source-count search.

A repeater node must assemble its photonic cluster from 3-photon GHZ states
through ``k`` rounds of probabilistic fusion.  Two multiplexing strategies
are modelled:

* **Naive**: every fusion stage is multiplexed independently (``n_b``
  parallel attempts per fusion, ``n_ghz`` per GHZ state, ``n_meas`` final
  copies), with no photon reuse across attempts, giving the closed
  recursion of :func:`naive_pc1` and a source count
  ``N_s = 6 n_ghz n_meas (2 n_b)**k``.

* **Banked**: all heralded GHZ states produced in a clock cycle are pooled
  into ``2**k`` banks at the leaves of a balanced binary fusion tree; each
  fusion level pairs sibling banks and succeeds per attempt with the
  level's fusion probability, so the bank counts evolve as a binomial
  cascade ``y -> Binomial(min(y1, y2), p_l)``.  Leaf banks that host a
  photon destined for early measurement receive proportionally more GHZ
  states (weight ``1 / (p_chip * eta_ghz)``) and are thinned by that same
  survival after allocation.

The banked scheme is evaluated both by seeded Monte Carlo
(:func:`improved_pc1_mc`) and by exact propagation of per-bank count
distributions (:func:`improved_pc1_exact`); the two serve as mutual
cross-checks.  :func:`min_sources` searches for the smallest source count
meeting a target probability that all ``n`` nodes fire in one clock cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as sp_stats

from .errors import (
    CapTooSmallError,
    DesignInfeasibleError,
    InvalidConfigurationError,
    TargetUnreachableError,
)
from .params import DerivedConstants

__all__ = [
    "NaiveMultiplex",
    "FusionSchedule",
    "NAIVE_FORMULAS",
    "naive_pc1",
    "optimize_naive_multiplex",
    "build_schedule",
    "allocate_ghz_counts",
    "fusion_probabilities",
    "improved_pc1_mc",
    "improved_pc1_exact",
    "pcn",
    "min_sources",
    "pcn_curve",
]

NAIVE_FORMULAS = ("banked", "flattened", "printed")

_MC_BLOCK = 16384
_TAIL_MASS = 1e-12
_EXACT_BANK_LIMIT = 256  # largest 2**k the exact propagation is used for by default


@dataclass(frozen=True)
class NaiveMultiplex:
    """Multiplexing depths of the naive scheme (all >= 1)."""

    n_b: int
    n_ghz: int
    n_meas: int

    def __post_init__(self) -> None:
        for name in ("n_b", "n_ghz", "n_meas"):
            if getattr(self, name) < 1:
                raise InvalidConfigurationError(
                    f"{name} must be >= 1, got {getattr(self, name)!r}"
                )

    def sources(self, k: int) -> int:
        """Single-photon sources implied: ``6 n_ghz n_meas (2 n_b)**k``."""
        return 6 * self.n_ghz * self.n_meas * (2 * self.n_b) ** k


@dataclass(frozen=True)
class FusionSchedule:
    """Balanced binary fusion tree over ``2**k`` leaf GHZ banks.

    Attributes
    ----------
    k : int
        Fusion levels.
    measured_mask : tuple of bool
        Which of the ``2**k`` leaf banks host a photon that is measured
        right after assembly (length must be ``2**k``).
    weights : tuple of float
        Per-bank GHZ allocation weights; measured banks carry
        ``1 / (p_chip * eta_ghz)``, the rest ``1``.
    """

    k: int
    measured_mask: tuple[bool, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InvalidConfigurationError(f"k must be >= 1, got {self.k!r}")
        leaves = 2**self.k
        if len(self.measured_mask) != leaves or len(self.weights) != leaves:
            raise InvalidConfigurationError(
                f"schedule for k={self.k} needs {leaves} leaf banks, got "
                f"{len(self.measured_mask)} mask / {len(self.weights)} weight entries"
            )
        if any(w <= 0 for w in self.weights):
            raise InvalidConfigurationError("allocation weights must be positive")

    @property
    def leaf_banks(self) -> int:
        return 2**self.k

    @property
    def measured_leaves(self) -> int:
        return sum(self.measured_mask)


def build_schedule(k: int, m: int, consts: DerivedConstants) -> FusionSchedule:
    """Schedule with ``4m + 1`` measured leaves spread evenly over the banks.

    One pre-measured photon per leaf bank; the measured positions are
    ``floor(i * 2**k / (4m + 1))``, which spaces them as uniformly as the
    binary tree allows (and puts at most one in any sibling pair whenever
    the leaves outnumber the measured photons two to one).

    Raises
    ------
    DesignInfeasibleError
        When ``4m + 1 > 2**k`` so the leaves cannot host the measured
        photons one each.
    """
    if m < 1:
        raise InvalidConfigurationError(f"channel count m must be >= 1, got {m}")
    leaves = 2**k
    need = 4 * m + 1
    if need > leaves:
        raise DesignInfeasibleError(
            f"design needs {need} measured leaves but a k={k} fusion tree has "
            f"only {leaves}"
        )
    mask = [False] * leaves
    for i in range(need):
        mask[i * leaves // need] = True
    heavy = 1.0 / (consts.p_chip * consts.eta_ghz)
    weights = tuple(heavy if flagged else 1.0 for flagged in mask)
    return FusionSchedule(k=k, measured_mask=tuple(mask), weights=weights)


def fusion_probabilities(k: int, consts: DerivedConstants) -> list[float]:
    """Per-level boosted fusion success probabilities ``p_l``, ``l = 1..k``.

    A level-``l`` fusion consumes one photon from each input fragment; both
    photons have survived ``l + 1`` on-chip feed-forward steps since their
    GHZ heralding, so
    ``p_l = (eta_ghz * p_chip**(l+1))**2 * boosted_pair_factor``.
    """
    return [
        (consts.eta_ghz * consts.p_chip ** (level + 1)) ** 2 * consts.boosted_pair_factor
        for level in range(1, k + 1)
    ]


def naive_pc1(
    mux: NaiveMultiplex,
    k: int,
    m: int,
    consts: DerivedConstants,
    formula: str = "banked",
):
    """Per-node, per-clock success probability of the naive scheme.

    The multiplexed recursion is::

        P_0 = 1 - (1 - p_ghz)**n_ghz
        Q_l = (eta_ghz * p_chip**l)**2 / 2
        P_l = 1 - (1 - P_{l-1}**2 * Q_l)**n_b
        P'  = (eta_ghz * p_chip**(k+1))**(4m+1)

    Three readings of the final multiplexing stage are selectable for
    auditing (they agree on ``n_meas = 1``, ``k = 1`` limits but diverge at
    scale):

    * ``"banked"`` (default): the level-``k`` bank feeds ``n_meas``
      conversion attempts, ``P_c1 = 1 - (1 - P_k * P')**n_meas``.  This is
      the reading consistent with the ``(2 n_b)**k`` source accounting and
      is the one whose optimised source counts land near the published
      scale.
    * ``"flattened"``: the last fusion is merged into the conversion stage,
      ``P_c1 = 1 - (1 - P_{k-1}**2 * Q_k * P')**n_meas``.
    * ``"printed"``: ``P_c1 = 1 - (Q_k * P')**n_meas`` taken literally; kept
      only for auditing since it is not monotone in the success factors.

    """
    result = _naive_pc1_core(
        np.asarray(mux.n_b), np.asarray(mux.n_ghz), np.asarray(mux.n_meas),
        k, m, consts, formula,
    )
    return float(result)


def _naive_pc1_core(
    n_b: np.ndarray,
    n_ghz: np.ndarray,
    n_meas: np.ndarray,
    k: int,
    m: int,
    consts: DerivedConstants,
    formula: str,
) -> np.ndarray:
    """Array core of :func:`naive_pc1` over aligned multiplex-depth arrays."""
    if formula not in NAIVE_FORMULAS:
        raise InvalidConfigurationError(
            f"unknown naive formula {formula!r}; expected one of {NAIVE_FORMULAS}"
        )
    if k < 1:
        raise InvalidConfigurationError(f"k must be >= 1, got {k}")
    p_level = -np.expm1(n_ghz * math.log1p(-consts.p_ghz))
    last_recursed = k if formula == "banked" else k - 1
    for level in range(1, last_recursed + 1):
        q_l = (consts.eta_ghz * consts.p_chip**level) ** 2 / 2.0
        p_level = -np.expm1(n_b * np.log1p(-(p_level**2 * q_l)))
    p_convert = (consts.eta_ghz * consts.p_chip ** (k + 1)) ** (4 * m + 1)
    if formula == "banked":
        per_attempt = p_level * p_convert
    elif formula == "flattened":
        q_k = (consts.eta_ghz * consts.p_chip**k) ** 2 / 2.0
        per_attempt = p_level**2 * q_k * p_convert
    else:  # printed
        q_k = (consts.eta_ghz * consts.p_chip**k) ** 2 / 2.0
        return 1.0 - (q_k * p_convert) ** n_meas
    return -np.expm1(n_meas * np.log1p(-per_attempt))


def optimize_naive_multiplex(
    n_s: int,
    k: int,
    m: int,
    consts: DerivedConstants,
    formula: str = "banked",
    grid_max: int = 200,
) -> tuple[NaiveMultiplex | None, float]:
    """Best ``(n_b, n_ghz, n_meas)`` within a source budget ``n_s``.

    Scans ``n_ghz, n_meas`` exhaustively on ``[1, grid_max]**2``; the budget
    identity then fixes the largest admissible ``n_b`` for each pair.  Ties
    in the success probability are broken toward larger ``n_b``.  Returns
    ``(None, 0.0)`` when even ``(1, 1, 1)`` exceeds the budget.
    """
    if n_s < 6 * 2**k:
        return None, 0.0
    grid = np.arange(1, grid_max + 1)
    n_ghz, n_meas = np.meshgrid(grid, grid, indexing="ij")
    budget = n_s // (6 * n_ghz * n_meas)
    feasible = budget >= 2**k
    with np.errstate(divide="ignore", invalid="ignore"):
        n_b = np.floor(np.power(budget, 1.0 / k) / 2.0).astype(np.int64)
    n_b[~feasible] = 0
    # float root-taking can land one low; push up while the budget allows
    for _ in range(2):
        grows = feasible & ((2 * (n_b + 1)) ** k <= budget)
        n_b[grows] += 1
    n_b = np.maximum(n_b, 1)
    pc1 = _naive_pc1_core(n_b, n_ghz, n_meas, k, m, consts, formula)
    pc1 = np.where(feasible, pc1, -1.0)
    best_flat = np.argmax(pc1)
    best_val = pc1.flat[best_flat]
    if best_val < 0.0:
        return None, 0.0
    ties = np.nonzero(pc1 == best_val)
    tie_order = np.argmax(n_b[ties])
    i, j = ties[0][tie_order], ties[1][tie_order]
    mux = NaiveMultiplex(n_b=int(n_b[i, j]), n_ghz=int(n_ghz[i, j]), n_meas=int(n_meas[i, j]))
    return mux, float(best_val)


def allocate_ghz_counts(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Deterministically apportion GHZ successes to banks, largest remainder.

    Each row of the result sums to the corresponding entry of ``x``; shares
    are proportional to ``weights`` with fractional remainders resolved
    largest-first (ties by bank index).

    Parameters
    ----------
    x : ndarray of int, shape (t,)
        GHZ successes to distribute, one entry per trial.
    weights : ndarray of float, shape (banks,)

    Returns
    -------
    ndarray of int64, shape (t, banks)
    """
    x = np.asarray(x, dtype=np.int64)
    weights = np.asarray(weights, dtype=float)
    share = weights / weights.sum()
    exact = x[:, None] * share[None, :]
    base = np.floor(exact).astype(np.int64)
    deficit = x - base.sum(axis=1)
    remainder = exact - base
    order = np.argsort(-remainder, axis=1, kind="stable")
    grant = np.arange(weights.size)[None, :] < deficit[:, None]
    increment = np.zeros_like(base)
    np.put_along_axis(increment, order, grant.astype(np.int64), axis=1)
    return base + increment


def _cascade_mc(
    counts: np.ndarray,
    probs: Sequence[float],
    rng: np.random.Generator,
) -> np.ndarray:
    """Run the pairwise binomial fusion cascade on per-trial bank counts."""
    y = counts
    for p_level in probs:
        y = rng.binomial(np.minimum(y[:, 0::2], y[:, 1::2]), p_level)
    return y[:, 0]


def improved_pc1_mc(
    n_s: int,
    sched: FusionSchedule,
    consts: DerivedConstants,
    trials: int = 10**5,
    seed: int = 0,
    ghz_source: bool = False,
    fusion_probs: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Monte Carlo estimate of the banked scheme's ``P_c1``.

    Per trial: draw the GHZ-factory successes ``x ~ Binomial(n_s // 6,
    p_ghz)`` (or take ``x = n_s`` deterministic GHZ states when
    ``ghz_source``), apportion them to the leaf banks by largest remainder
    on the schedule weights, thin the measured banks by
    ``Binomial(., p_chip * eta_ghz)``, then combine sibling banks level by
    level as ``Binomial(min(y1, y2), p_l)``.  The estimate is the fraction
    of trials whose root bank is non-empty.

    Trials are partitioned into fixed-size blocks, each driven by its own
    counter-based generator keyed on ``(seed, block index)``, so the result
    is bit-identical for a given ``(seed, trials)`` regardless of how the
    blocks are scheduled.

    Returns
    -------
    (estimate, standard_error)
    """
    if trials < 1:
        raise InvalidConfigurationError(f"trials must be >= 1, got {trials}")
    if seed < 0:
        raise InvalidConfigurationError(f"seed must be >= 0, got {seed}")
    n_attempts = n_s if ghz_source else n_s // 6
    if n_attempts < 1:
        return 0.0, 0.0
    weights = np.asarray(sched.weights, dtype=float)
    measured = np.asarray(sched.measured_mask, dtype=bool)
    thin_p = consts.p_chip * consts.eta_ghz
    probs = list(fusion_probs) if fusion_probs is not None else fusion_probabilities(
        sched.k, consts
    )
    if len(probs) != sched.k:
        raise InvalidConfigurationError(
            f"need {sched.k} fusion probabilities, got {len(probs)}"
        )
    hits = 0
    for block_index, start in enumerate(range(0, trials, _MC_BLOCK)):
        block = min(_MC_BLOCK, trials - start)
        rng = np.random.Generator(np.random.Philox(key=(seed << 64) + block_index))
        if ghz_source:
            x = np.full(block, n_attempts, dtype=np.int64)
        else:
            x = rng.binomial(n_attempts, consts.p_ghz, size=block).astype(np.int64)
        counts = allocate_ghz_counts(x, weights)
        counts[:, measured] = rng.binomial(counts[:, measured], thin_p)
        hits += int((_cascade_mc(counts, probs, rng) > 0).sum())
    estimate = hits / trials
    return estimate, math.sqrt(estimate * (1.0 - estimate) / trials)


def _thin_matrix(cap: int, p: float) -> np.ndarray:
    """Binomial-thinning transition matrix ``T[y, j] = Binom(j; y, p)``."""
    counts = np.arange(cap + 1)
    return sp_stats.binom.pmf(counts[None, :], counts[:, None], p)


def _min_pair_pmfs(pmfs: np.ndarray) -> np.ndarray:
    """PMFs of ``min(Y1, Y2)`` for independent adjacent banks.

    The bank axis is the second-to-last one; leading axes broadcast.
    """
    # survival S[c] = P[Y >= c]
    survival = np.cumsum(pmfs[..., ::-1], axis=-1)[..., ::-1]
    paired = survival[..., 0::2, :] * survival[..., 1::2, :]
    pmf = paired.copy()
    pmf[..., :-1] -= paired[..., 1:]
    return pmf


def improved_pc1_exact(
    n_s: int,
    sched: FusionSchedule,
    consts: DerivedConstants,
    cap: int | None = None,
    ghz_source: bool = False,
    fusion_probs: Sequence[float] | None = None,
) -> float:
    """Exact ``P_c1`` of the banked scheme by count-distribution propagation.

    Conditions on the number ``x`` of heralded GHZ states: given ``x`` the
    largest-remainder allocation is deterministic and every subsequent
    thinning and fusion draw is independent across banks, so the per-bank
    count distributions propagate exactly through the ``min``-combine
    cascade.  Averaging the conditional success over the GHZ-success
    distribution (truncated to a window holding all but ``1e-12`` of the
    mass, then renormalised) gives ``P_c1``.  Counts never grow along the
    cascade, so a cap equal to the largest allocated count (the default) is
    lossless.

    The conditional success probability is non-decreasing in ``x`` (an
    extra GHZ state can only help), so the sweep over the window runs from
    small ``x`` upward and stops once the remaining weight cannot move the
    result by more than ``1e-16``.

    Raises
    ------
    CapTooSmallError
        When a user-supplied ``cap`` would truncate more than ``1e-9``
        probability mass at the allocation stage.
    """
    n_attempts = n_s if ghz_source else n_s // 6
    if n_attempts < 1:
        return 0.0
    weights = np.asarray(sched.weights, dtype=float)
    measured = np.asarray(sched.measured_mask, dtype=bool)
    thin_p = consts.p_chip * consts.eta_ghz
    probs = list(fusion_probs) if fusion_probs is not None else fusion_probabilities(
        sched.k, consts
    )
    if len(probs) != sched.k:
        raise InvalidConfigurationError(
            f"need {sched.k} fusion probabilities, got {len(probs)}"
        )

    if ghz_source:
        xs = np.array([n_attempts], dtype=np.int64)
        px = np.array([1.0])
    else:
        dist = sp_stats.binom(n_attempts, consts.p_ghz)
        mean = n_attempts * consts.p_ghz
        sd = math.sqrt(max(mean * (1.0 - consts.p_ghz), 1.0))
        half_width = 8.5 * sd
        lo = max(0, math.floor(mean - half_width))
        hi = min(n_attempts, math.ceil(mean + half_width))
        while dist.cdf(hi) - (dist.cdf(lo - 1) if lo > 0 else 0.0) < 1.0 - _TAIL_MASS:
            lo = max(0, lo - math.ceil(4 * sd))
            hi = min(n_attempts, hi + math.ceil(4 * sd))
            if lo == 0 and hi == n_attempts:
                break
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        px = dist.pmf(xs)
        px = px / px.sum()

    alloc = allocate_ghz_counts(xs, weights)
    needed_cap = int(alloc.max())
    if cap is None:
        cap = needed_cap
    elif needed_cap > cap:
        overflow = px[(alloc > cap).any(axis=1)].sum()
        if overflow > 1e-9:
            raise CapTooSmallError(
                f"cap {cap} truncates {overflow:.3g} probability mass "
                f"(largest allocated count is {needed_cap})"
            )
        alloc = np.minimum(alloc, cap)

    banks = sched.leaf_banks
    thin_meas = _thin_matrix(cap, thin_p) if measured.any() else None
    # Counts concentrate near (previous count) * p_level after each fusion
    # thinning, so each level's support is cut 10 sigma above that mean;
    # the dropped mass (< 1e-20 per bank) only ever understates success.
    caps = [cap]
    for p_level in probs:
        centre = caps[-1] * p_level
        spread = math.sqrt(max(caps[-1] * p_level * (1.0 - p_level), 1.0))
        caps.append(min(caps[-1], math.ceil(centre + 10.0 * spread) + 5))
    thin_levels = [
        sp_stats.binom.pmf(
            np.arange(caps[level + 1] + 1)[None, :],
            np.arange(caps[level] + 1)[:, None],
            p_level,
        )
        for level, p_level in enumerate(probs)
    ]
    bank_index = np.arange(banks)

    success = 0.0
    weight_done = 0.0
    chunk = max(1, 4_000_000 // (banks * (cap + 1)))
    for start in range(0, len(xs), chunk):
        counts = alloc[start : start + chunk]
        rows = counts.shape[0]
        pmfs = np.zeros((rows, banks, cap + 1))
        pmfs[np.arange(rows)[:, None], bank_index[None, :], counts] = 1.0
        if thin_meas is not None:
            pmfs[:, measured, :] = thin_meas[counts[:, measured]]
        for matrix in thin_levels:
            pmfs = _min_pair_pmfs(pmfs) @ matrix
        conditional = 1.0 - pmfs[:, 0, 0]
        block_px = px[start : start + rows]
        success += float(block_px @ conditional)
        weight_done += float(block_px.sum())
        # monotone in x: every remaining x succeeds at least as often
        remaining = 1.0 - weight_done
        if remaining * (1.0 - conditional[-1]) < 1e-16:
            success += remaining * float(conditional[-1])
            break
    return float(min(max(success, 0.0), 1.0))


def pcn(p_c1: float, n: int) -> float:
    """Probability that all ``n`` nodes build their clusters: ``p_c1**n``."""
    if not 0.0 <= p_c1 <= 1.0:
        raise InvalidConfigurationError(f"p_c1 must lie in [0, 1], got {p_c1!r}")
    if n < 1:
        raise InvalidConfigurationError(f"n must be >= 1, got {n}")
    return p_c1**n


def _pc1_evaluator(
    scheme: str,
    k: int,
    m: int,
    consts: DerivedConstants,
    method: str,
    trials: int,
    seed: int,
    formula: str,
):
    """Build a ``p_c1(n_s)`` callable for one scheme; see :func:`min_sources`."""
    if scheme == "naive":
        def evaluate(n_s: int) -> float:
            return optimize_naive_multiplex(n_s, k, m, consts, formula)[1]

        return evaluate
    if scheme not in ("improved", "ghz_primitive"):
        raise InvalidConfigurationError(
            f"unknown scheme {scheme!r}; expected 'naive', 'improved' or 'ghz_primitive'"
        )
    sched = build_schedule(k, m, consts)
    ghz_source = scheme == "ghz_primitive"
    if method == "auto":
        method = "exact" if sched.leaf_banks <= _EXACT_BANK_LIMIT else "mc"
    if method == "exact":
        def evaluate(n_s: int) -> float:
            return improved_pc1_exact(n_s, sched, consts, ghz_source=ghz_source)

        return evaluate
    if method == "mc":
        def evaluate(n_s: int) -> float:
            return improved_pc1_mc(
                n_s, sched, consts, trials=trials, seed=seed, ghz_source=ghz_source
            )[0]

        return evaluate
    raise InvalidConfigurationError(
        f"unknown method {method!r}; expected 'auto', 'exact' or 'mc'"
    )


def min_sources(
    scheme: str,
    k: int,
    m: int,
    n: int,
    target_pcn: float,
    consts: DerivedConstants,
    method: str = "auto",
    trials: int = 10**5,
    seed: int = 0,
    ceiling: int = 10**15,
    formula: str = "banked",
) -> int:
    """Smallest source count whose per-cycle ``P_cn`` meets ``target_pcn``.

    Brackets the threshold by doubling, then bisects to 1% relative
    resolution, returning the feasible upper end.  ``scheme`` selects what a
    source is: single photons feeding GHZ factories (``"naive"`` and
    ``"improved"``) or deterministic 3-photon GHZ sources
    (``"ghz_primitive"``).  The naive scheme re-optimises its multiplexing
    depths at every candidate budget.

    Raises
    ------
    TargetUnreachableError
        When the target is not met even at ``ceiling`` sources.
    """
    if not 0.0 < target_pcn < 1.0:
        raise InvalidConfigurationError(
            f"target_pcn must lie in (0, 1), got {target_pcn!r}"
        )
    if n < 1:
        raise InvalidConfigurationError(f"n must be >= 1, got {n}")
    p_c1_target = target_pcn ** (1.0 / n)
    evaluate = _pc1_evaluator(scheme, k, m, consts, method, trials, seed, formula)

    def feasible(n_s: int) -> bool:
        return evaluate(n_s) >= p_c1_target

    lo, hi = 0, 6
    while not feasible(hi):
        lo = hi
        hi *= 2
        if hi > ceiling:
            raise TargetUnreachableError(
                f"P_cn target {target_pcn} not reachable below {ceiling:.3g} sources "
                f"for scheme '{scheme}' (k={k}, m={m}, n={n})"
            )
    while hi > lo + 1 and (hi - lo) > 0.01 * lo:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def pcn_curve(
    scheme: str,
    k: int,
    m: int,
    n: int,
    consts: DerivedConstants,
    source_counts: Sequence[int],
    method: str = "auto",
    trials: int = 10**5,
    seed: int = 0,
    formula: str = "banked",
) -> np.ndarray:
    """``P_cn`` as a function of source count, for resource-curve emission."""
    evaluate = _pc1_evaluator(scheme, k, m, consts, method, trials, seed, formula)
    return np.array([pcn(evaluate(int(n_s)), n) for n_s in source_counts])
