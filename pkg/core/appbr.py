"""
Twist pairs on a dimension-drop model with homeomorphic spectra but non-conjugate diagonals.

A nu x nu 0/1 matrix M with delta ones in every row and column, two equal
rows and pairwise distinct columns is found by search. The two twists
realize the biadjacency matrices diag(cM, cM) and diag(cM, (cM)^t): their
bipartite graphs are isomorphic only by swapping the two sides, so the
matrices are not congruent and the diagonals are not conjugate.
"""
from itertools import combinations
from typing import Dict, List, Optional

import networkx as nx
import numpy as np

from config import config
from core.nccw import dualize, twisted_ends
from models.dual import DualData, TwistPerm
from models.errors import PreconditionError, SearchBudgetError
from models.nccw import NccwData
from models.results import AppBRInstance
from utils.logger import get_logger
from utils.metrics import record_budget_exhausted

logger = get_logger(__name__)

P_LABEL = "p"
ROW_INDEX = "i0"
COL_INDEX = "i1"


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def check_parameters(nu: int, delta: int) -> None:
    """Raise PreconditionError unless nu >= 6 is composite and delta | nu with 3 <= delta <= nu - 3."""
    if nu < 6 or _is_prime(nu):
        raise PreconditionError(f"nu must be a composite number >= 6, got {nu}")
    if nu % delta or not 3 <= delta <= nu - 3:
        raise PreconditionError(f"delta must divide nu={nu} and lie in [3, {nu - 3}], got {delta}")


class _MatrixSearch:
    """Row-by-row search; rows 0 and 1 are fixed equal, later rows are delta-subsets in lexicographic order."""

    def __init__(self, nu: int, delta: int, budget: int):
        self.nu = nu
        self.delta = delta
        self.budget = budget
        self.nodes = 0
        self.rows: List[tuple] = []
        self.column_sums = [0] * nu

    def run(self) -> Optional[np.ndarray]:
        first = tuple(range(self.delta))
        for row in (first, first):
            self._place(row, 1)
        if not self._extend():
            return None
        matrix = np.zeros((self.nu, self.nu), dtype=np.int64)
        for a, row in enumerate(self.rows):
            matrix[a, list(row)] = 1
        return matrix

    def _place(self, row: tuple, sign: int) -> None:
        if sign > 0:
            self.rows.append(row)
        else:
            self.rows.pop()
        for c in row:
            self.column_sums[c] += sign

    def _full_columns_distinct(self) -> bool:
        seen = set()
        for c in range(self.nu):
            if self.column_sums[c] != self.delta:
                continue
            vector = tuple(c in row for row in self.rows)
            if vector in seen:
                return False
            seen.add(vector)
        return True

    def _extend(self) -> bool:
        left = self.nu - len(self.rows)
        if left == 0:
            return self._full_columns_distinct()
        if any(self.delta - total > left for total in self.column_sums):
            return False
        start = self.rows[-1] if len(self.rows) > 2 else None
        for row in combinations(range(self.nu), self.delta):
            if start is not None and row < start:
                continue
            if any(self.column_sums[c] >= self.delta for c in row):
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetError(f"matrix search exceeded {self.budget} nodes")
            self._place(row, 1)
            if self._full_columns_distinct() and self._extend():
                return True
            self._place(row, -1)
        return False


def find_matrix(nu: int, delta: int, budget: Optional[int] = None) -> np.ndarray:
    """The lexicographically first admissible M.

    Raises:
        PreconditionError: bad (nu, delta)
        SearchBudgetError: no M found within the budget
    """
    check_parameters(nu, delta)
    budget = budget or config.get('classify.appbr_search_budget', 200000)
    try:
        matrix = _MatrixSearch(nu, delta, budget).run()
    except SearchBudgetError:
        record_budget_exhausted("appbr")
        raise
    if matrix is None:
        raise SearchBudgetError(f"no matrix exists for nu={nu}, delta={delta}")
    return matrix


def block_diagonal(upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    n = upper.shape[0]
    result = np.zeros((2 * n, 2 * n), dtype=np.int64)
    result[:n, :n] = upper
    result[n:, n:] = lower
    return result


def model_data(nu: int) -> NccwData:
    """Dimension-drop model with E = M_{(2nu)^2} and F = M_{2nu} + M_{2nu}."""
    size = 2 * nu
    return NccwData.from_table(
        {P_LABEL: size * size},
        {ROW_INDEX: size, COL_INDEX: size},
        {(0, P_LABEL, ROW_INDEX): size, (1, P_LABEL, COL_INDEX): size},
    )


def realize_matrix(dual: DualData, matrix: np.ndarray) -> TwistPerm:
    """Greedy row-major twist with #{y : (b0(y), b1(sigma(y))) = (x0, x1)} = matrix[x0][x1]."""
    remaining = matrix.copy()
    pool: Dict = {x: [] for x in dual.x_blocks[COL_INDEX]}
    for z in dual.y_blocks[P_LABEL]:
        pool[dual.b1[z]].append(z)
    rows = dual.x_blocks[ROW_INDEX]
    cols = dual.x_blocks[COL_INDEX]
    mapping = {}
    for y in dual.y_blocks[P_LABEL]:
        a = rows.index(dual.b0[y])
        b = int(np.flatnonzero(remaining[a])[0])
        remaining[a, b] -= 1
        mapping[y] = pool[cols[b]].pop(0)
    return TwistPerm.from_mapping(dual, mapping)


def biadjacency(dual: DualData, twist: TwistPerm) -> np.ndarray:
    """Matrix counting twisted edges from X^{i0} to X^{i1}."""
    rows = {x: a for a, x in enumerate(dual.x_blocks[ROW_INDEX])}
    cols = {x: b for b, x in enumerate(dual.x_blocks[COL_INDEX])}
    tail, head = twisted_ends(dual, twist)
    matrix = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for y in dual.y_blocks[P_LABEL]:
        matrix[rows[tail[y]], cols[head[y]]] += 1
    return matrix


def build_appbr(nu: int, delta: int) -> AppBRInstance:
    """Build M, M_sigma, M_tau and the twists sigma, tau on the model data.

    Raises:
        PreconditionError: bad (nu, delta)
        SearchBudgetError: the matrix search was exhausted
    """
    m = find_matrix(nu, delta)
    factor = 2 * nu // delta
    m_sigma = block_diagonal(factor * m, factor * m)
    m_tau = block_diagonal(factor * m, (factor * m).T)

    data = model_data(nu)
    dual = dualize(data)
    sigma = realize_matrix(dual, m_sigma)
    tau = realize_matrix(dual, m_tau)
    for name, twist, target in (("sigma", sigma, m_sigma), ("tau", tau, m_tau)):
        if not np.array_equal(biadjacency(dual, twist), target):
            raise RuntimeError(f"twist {name} does not realize its matrix")
    logger.info(f"Built instance for nu={nu}, delta={delta} with c={factor}")
    return AppBRInstance(nu=nu, delta=delta, m=m, m_sigma=m_sigma, m_tau=m_tau, factor=factor,
                         data=data, sigma=sigma, tau=tau)


def bipartite_graph(matrix: np.ndarray) -> nx.Graph:
    """Weighted bipartite graph with biadjacency ``matrix``, sides unlabelled."""
    graph = nx.Graph()
    n_rows, n_cols = matrix.shape
    graph.add_nodes_from(("r", a) for a in range(n_rows))
    graph.add_nodes_from(("c", b) for b in range(n_cols))
    for a, b in zip(*np.nonzero(matrix)):
        graph.add_edge(("r", int(a)), ("c", int(b)), weight=int(matrix[a, b]))
    return graph


def graphs_isomorphic(m_sigma: np.ndarray, m_tau: np.ndarray) -> bool:
    """Unoriented isomorphism of the bipartite multigraphs of two matrices."""
    match = nx.algorithms.isomorphism.numerical_edge_match("weight", 0)
    return nx.is_isomorphic(bipartite_graph(m_sigma), bipartite_graph(m_tau), edge_match=match)
