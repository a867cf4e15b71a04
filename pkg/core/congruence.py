"""Congruence of non-negative integer matrices under row and column permutations."""
from collections import Counter
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import config
from models.errors import InputError, SearchBudgetError
from models.results import CongruenceResult, CongruenceWitness
from utils.logger import get_logger
from utils.metrics import record_budget_exhausted

logger = get_logger(__name__)


def _as_matrix(values, name: str) -> np.ndarray:
    matrix = np.asarray(values, dtype=np.int64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InputError(f"{name} must be a square matrix, got shape {matrix.shape}")
    if (matrix < 0).any():
        raise InputError(f"{name} has negative entries")
    return matrix


def _distinct(vectors: np.ndarray) -> int:
    return len({tuple(v) for v in vectors})


def _contents(matrix: np.ndarray) -> List[tuple]:
    return sorted(tuple(sorted(row)) for row in matrix.tolist())


def _screen(sigma: np.ndarray, other: np.ndarray, name: str) -> Optional[str]:
    """Cheap invariants; the first that differs is returned as the obstruction."""
    if sorted(sigma.ravel().tolist()) != sorted(other.ravel().tolist()):
        return f"entry multisets of M_sigma and {name} differ"
    n = sigma.shape[0]
    for axis, word in ((1, "columns"), (0, "rows")):
        vectors_sigma = sigma.T if axis == 1 else sigma
        vectors_other = other.T if axis == 1 else other
        da, db = _distinct(vectors_sigma), _distinct(vectors_other)
        if da == db:
            continue
        if da == n and db == n - 1:
            return f"{name} has two identical {word}, M_sigma has pairwise distinct {word}"
        if db == n and da == n - 1:
            return f"M_sigma has two identical {word}, {name} has pairwise distinct {word}"
        return f"M_sigma has {da} distinct {word}, {name} has {db}"
    if _contents(sigma) != _contents(other):
        return f"row contents of M_sigma and {name} differ"
    if _contents(sigma.T) != _contents(other.T):
        return f"column contents of M_sigma and {name} differ"
    return None


class _RowSearch:
    """Backtracking over row bijections, pruned by the multiset of column prefixes."""

    def __init__(self, sigma: np.ndarray, other: np.ndarray, budget: int):
        self.sigma = sigma
        self.other = other
        self.n = sigma.shape[0]
        self.budget = budget
        self.nodes = 0
        self.row_keys = [tuple(sorted(r)) for r in sigma.tolist()]
        self.other_keys = [tuple(sorted(r)) for r in other.tolist()]

    def solve(self) -> Optional[Tuple[List[int], List[int]]]:
        rows: List[int] = []
        if not self._extend(rows, [()] * self.n, [()] * self.n):
            return None
        return rows, self._columns(rows)

    def _extend(self, rows: List[int], prefix_sigma: Sequence[tuple], prefix_other: Sequence[tuple]) -> bool:
        a = len(rows)
        if a == self.n:
            return True
        used = set(rows)
        for candidate in range(self.n):
            if candidate in used or self.other_keys[candidate] != self.row_keys[a]:
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetError(f"congruence search exceeded {self.budget} nodes")
            next_sigma = [p + (int(self.sigma[a, b]),) for b, p in enumerate(prefix_sigma)]
            next_other = [p + (int(self.other[candidate, c]),) for c, p in enumerate(prefix_other)]
            if Counter(next_sigma) != Counter(next_other):
                continue
            rows.append(candidate)
            if self._extend(rows, next_sigma, next_other):
                return True
            rows.pop()
        return False

    def _columns(self, rows: List[int]) -> List[int]:
        permuted = self.other[rows, :]
        free: dict = {}
        for c in range(self.n):
            free.setdefault(tuple(permuted[:, c].tolist()), []).append(c)
        return [free[tuple(self.sigma[:, b].tolist())].pop(0) for b in range(self.n)]


def apply_witness(m_tau, witness: CongruenceWitness) -> np.ndarray:
    """The matrix M' permuted by the witness; equals M_sigma when the witness is valid."""
    other = _as_matrix(m_tau, "M_tau")
    if witness.transposed:
        other = other.T
    return other[np.ix_(list(witness.rows), list(witness.cols))]


def congruence_test(m_sigma, m_tau) -> CongruenceResult:
    """Decide whether M_sigma = P M_tau Q or M_sigma = P M_tau^t Q for permutations P, Q.

    Args:
        m_sigma: Square non-negative integer matrix
        m_tau: Square non-negative integer matrix of the same size

    Returns:
        CongruenceResult with a verified witness, or the reason no witness exists

    Raises:
        InputError: shapes differ or entries are negative
        SearchBudgetError: backtracking exceeded classify.congruence_search_budget
    """
    sigma = _as_matrix(m_sigma, "M_sigma")
    tau = _as_matrix(m_tau, "M_tau")
    if sigma.shape != tau.shape:
        raise InputError(f"matrix sizes differ: {sigma.shape} vs {tau.shape}")

    budget = config.get('classify.congruence_search_budget', 1000000)
    reasons = []
    for transposed in (False, True):
        other = tau.T if transposed else tau
        name = "M_tau^t" if transposed else "M_tau"
        reason = _screen(sigma, other, name)
        if reason is not None:
            reasons.append(reason)
            continue
        try:
            solved = _RowSearch(sigma, other, budget).solve()
        except SearchBudgetError:
            record_budget_exhausted("congruence")
            raise
        if solved is None:
            reasons.append(f"no row and column permutation carries {name} to M_sigma")
            continue
        witness = CongruenceWitness(rows=tuple(solved[0]), cols=tuple(solved[1]), transposed=transposed)
        if not np.array_equal(apply_witness(tau, witness), sigma):
            raise RuntimeError("congruence witness failed verification")
        return CongruenceResult(True, witness, None)

    logger.debug(f"Matrices not congruent: {reasons}")
    return CongruenceResult(False, None, "; ".join(reasons))
