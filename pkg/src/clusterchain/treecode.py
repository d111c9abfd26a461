"""Tree-cluster geometry and counterfactual loss-correction probabilities.

A logical qubit is protected by attaching a tree cluster described by a
branching vector ``{b_0, ..., b_d}``: the root has ``b_0`` children, every
depth-1 vertex has ``b_1`` children, and so on, ending with leaves at depth
``d + 1``.  When each photon of the tree is lost independently with
probability ``eps``, a lost qubit's measurement outcome can still be
recovered *counterfactually* from measurements on the surviving tree
photons.  The success probabilities obey a two-level recursion::

    xi_i = 1 - [1 - (1 - eps) * (1 - eps + eps * xi_{i+2}) ** b_{i+1}] ** b_i

with ``xi`` at depth ``d`` closing the recursion through ``b_{d+1} = 0``
(an empty product counts as 1, so ``xi_d = 1 - eps ** b_d``).  The logical
measurement probabilities are ``P_X = xi_0`` and
``P_Z = (1 - eps + eps * xi_1) ** b_0``.

Besides the recursion this module carries a Monte Carlo oracle that samples
explicit loss configurations and applies the *combinatorial* success rule
(at least one subtree whose root survived and whose children are all
measurable), giving an independent check of the algebra rather than of the
formula's transcription.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BranchingVector",
    "LossRates",
    "MCMeasurementEstimate",
    "tree_size",
    "xi",
    "p_x_general",
    "p_z_general",
    "p_x_depth2",
    "p_z_depth2",
    "mc_xi",
    "mc_measurement_probs",
]


@dataclass(frozen=True)
class BranchingVector:
    """Shape of a loss-protection tree.

    Attributes
    ----------
    branches : tuple of int
        Child counts per depth, ``(b_0, ..., b_d)``; every entry >= 1.
    """

    branches: tuple[int, ...]

    def __init__(self, branches: Iterable[int]) -> None:
        entries = tuple(int(b) for b in branches)
        if not entries:
            raise ValueError("branching vector must have at least one level")
        if any(b < 1 for b in entries):
            raise ValueError(f"branching vector entries must be >= 1, got {entries}")
        object.__setattr__(self, "branches", entries)

    @classmethod
    def parse(cls, text: str) -> BranchingVector:
        """Parse a comma-separated list such as ``"7,3"``."""
        try:
            return cls(int(part) for part in text.split(","))
        except ValueError as exc:
            raise ValueError(f"cannot parse branching vector from {text!r}") from exc

    @property
    def depth(self) -> int:
        """Largest depth index ``d`` (one less than the number of levels)."""
        return len(self.branches) - 1

    @property
    def size(self) -> int:
        """Total photon count of the tree, root included."""
        return tree_size(self)

    def __str__(self) -> str:
        return "{" + ",".join(str(b) for b in self.branches) + "}"


@dataclass(frozen=True)
class LossRates:
    """Loss probabilities seen by the two photon populations of a chain node.

    Attributes
    ----------
    eps_trav : float
        Loss rate of the traveling (outer) qubits, which cross half an
        elementary link and are detected at the midpoint station.
    eps_stat : float
        Loss rate of the stationary (core) qubits, which additionally wait
        in fiber for the midpoint heralds; always >= ``eps_trav``.
    """

    eps_trav: float
    eps_stat: float

    def __post_init__(self) -> None:
        for name in ("eps_trav", "eps_stat"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class MCMeasurementEstimate:
    """Monte Carlo estimates of the logical measurement probabilities."""

    p_x: float
    p_x_err: float
    p_z: float
    p_z_err: float


def tree_size(b: BranchingVector) -> int:
    """Photon count of the tree: ``1 + b0 + b0*b1 + ... + b0*...*bd``."""
    total, level = 1, 1
    for count in b.branches:
        level *= count
        total += level
    return total


def xi(i: int, b: BranchingVector, eps: float | np.ndarray) -> float | np.ndarray:
    """Success probability of an indirect Z measurement at depth ``i``.

    Evaluates the recursion iteratively from the deepest level upward, so
    the call depth is constant.  ``eps`` may be a scalar or an array (the
    recursion is elementwise in the loss rate).

    Parameters
    ----------
    i : int
        Depth index, ``0 <= i <= b.depth``.
    b : BranchingVector
    eps : float or ndarray
        Photon loss probability in [0, 1].

    Returns
    -------
    float or ndarray
    """
    if not 0 <= i <= b.depth:
        raise IndexError(f"depth index {i} out of range for {b}")
    eps_arr = np.asarray(eps, dtype=float)
    br = b.branches
    ones = np.ones_like(eps_arr)
    xi_next = np.zeros_like(eps_arr)  # xi_{j+1}
    xi_next2 = np.zeros_like(eps_arr)  # xi_{j+2}
    value = ones
    for j in range(b.depth, i - 1, -1):
        b_below = br[j + 1] if j + 1 <= b.depth else 0
        inner = (1.0 - eps_arr + eps_arr * xi_next2) ** b_below if b_below else ones
        value = 1.0 - (1.0 - (1.0 - eps_arr) * inner) ** br[j]
        xi_next2 = xi_next
        xi_next = value
    if np.isscalar(eps) or np.ndim(eps) == 0:
        return float(value)
    return value


def p_x_general(b: BranchingVector, eps: float | np.ndarray) -> float | np.ndarray:
    """Logical X success probability ``P_X = xi_0`` for any tree depth."""
    return xi(0, b, eps)


def p_z_general(b: BranchingVector, eps: float | np.ndarray) -> float | np.ndarray:
    """Logical Z success probability ``P_Z = (1 - eps + eps*xi_1) ** b_0``."""
    eps_arr = np.asarray(eps, dtype=float)
    xi_1 = xi(1, b, eps_arr) if b.depth >= 1 else np.zeros_like(eps_arr)
    value = (1.0 - eps_arr + eps_arr * xi_1) ** b.branches[0]
    if np.isscalar(eps) or np.ndim(eps) == 0:
        return float(value)
    return value


def p_x_depth2(
    b0: int, b1: int, eta_link: float | np.ndarray, b_coeff: float
) -> float | np.ndarray:
    """Depth-2 closed form of ``P_X`` at survival ``eta_link * b_coeff``.

    Equals :func:`p_x_general` on ``{b0, b1}`` with
    ``eps = 1 - eta_link * b_coeff``.
    """
    survival = np.asarray(eta_link, dtype=float) * b_coeff
    value = 1.0 - (1.0 - survival ** (b1 + 1)) ** b0
    return float(value) if np.ndim(eta_link) == 0 else value


def p_z_depth2(
    b0: int, b1: int, eta_link: float | np.ndarray, b_coeff: float
) -> float | np.ndarray:
    """Depth-2 closed form of ``P_Z`` at survival ``eta_link * b_coeff``."""
    survival = np.asarray(eta_link, dtype=float) * b_coeff
    value = (1.0 - (1.0 - survival) ** (b1 + 1)) ** b0
    return float(value) if np.ndim(eta_link) == 0 else value


def _level_widths(b: BranchingVector) -> list[int]:
    """Vertex counts per level, root (width 1) through leaves."""
    widths = [1]
    for count in b.branches:
        widths.append(widths[-1] * count)
    return widths


def _simulate_tree(
    b: BranchingVector, eps: float, samples: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Sample loss configurations and apply the combinatorial success rule.

    Returns per-sample booleans ``(x_success, z_success)``: whether an
    indirect Z on the root succeeds, and whether every child of the root is
    measurable (survived, or indirectly recoverable).

    The rule evaluated bottom-up: an indirect Z at vertex ``v`` succeeds if
    at least one child ``c`` of ``v`` survived while every child of ``c`` is
    itself measurable.  Vertices at a level are laid out contiguously so the
    per-level arrays reshape into (parent, child) blocks.
    """
    widths = _level_widths(b)
    depth = b.depth
    survive = [rng.random((samples, w)) >= eps for w in widths]

    measurable_next = survive[depth + 1]  # leaves: no children, so M = S
    measurable_next2: np.ndarray | None = None
    indirect = np.zeros((samples, 1), dtype=bool)
    z_success: np.ndarray | None = None
    for j in range(depth, -1, -1):
        if j == depth:
            all_grandchildren = np.ones((samples, widths[j + 1]), dtype=bool)
        else:
            assert measurable_next2 is not None
            all_grandchildren = measurable_next2.reshape(
                samples, widths[j + 1], b.branches[j + 1]
            ).all(axis=2)
        child_ok = survive[j + 1] & all_grandchildren
        indirect = child_ok.reshape(samples, widths[j], b.branches[j]).any(axis=2)
        measurable = survive[j] | indirect
        if j == 1:
            z_success = measurable.all(axis=1)
        measurable_next2 = measurable_next
        measurable_next = measurable
    if depth == 0:
        z_success = survive[1].all(axis=1)
    assert z_success is not None
    return indirect[:, 0], z_success


def mc_xi(
    i: int,
    b: BranchingVector,
    eps: float,
    samples: int = 10**6,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte Carlo estimate of ``xi_i`` with its standard error.

    The estimate simulates the subtree rooted at a depth-``i`` vertex, i.e.
    the branching vector ``b[i:]``; deterministic for a given
    ``(seed, samples)``.
    """
    if not 0 <= i <= b.depth:
        raise IndexError(f"depth index {i} out of range for {b}")
    sub = BranchingVector(b.branches[i:])
    rng = np.random.default_rng(seed)
    x_hits, _ = _simulate_tree(sub, eps, samples, rng)
    est = float(x_hits.mean())
    return est, math.sqrt(est * (1.0 - est) / samples)


def mc_measurement_probs(
    b: BranchingVector,
    eps: float,
    samples: int = 10**6,
    seed: int = 0,
) -> MCMeasurementEstimate:
    """Monte Carlo estimates of ``P_X`` and ``P_Z`` with standard errors."""
    rng = np.random.default_rng(seed)
    x_hits, z_hits = _simulate_tree(b, eps, samples, rng)
    p_x = float(x_hits.mean())
    p_z = float(z_hits.mean())
    return MCMeasurementEstimate(
        p_x=p_x,
        p_x_err=math.sqrt(p_x * (1.0 - p_x) / samples),
        p_z=p_z,
        p_z_err=math.sqrt(p_z * (1.0 - p_z) / samples),
    )
