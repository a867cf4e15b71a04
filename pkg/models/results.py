"""Result and certificate types returned by the classification layer."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Hashable, List, Optional, Tuple

from models.nccw import NccwData


@dataclass
class ValidationReport:
    """
    Result of validating NCCW data.

    Attributes:
        errors: Structural problems (negative sizes, layout collisions, (A2) violations)
        warnings: Non-fatal observations
        slot_totals: (r, p) -> number of diagonal slots of E^p hit by beta_r
        unital: (r, p) -> whether beta_r^p is unital
        incidence: i -> list of (r, p) with m_r(p, i) > 0
        a2_ok: whether F -> E + E is injective
        grave: the unique non-unital p on side 1 when all else is unital
    """
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    slot_totals: Dict[Tuple[int, str], int] = field(default_factory=dict)
    unital: Dict[Tuple[int, str], bool] = field(default_factory=dict)
    incidence: Dict[str, List[Tuple[int, str]]] = field(default_factory=dict)
    a2_ok: bool = True
    grave: Optional[str] = None

    @property
    def status(self) -> str:
        """Get validation status: 'success' if no errors, 'failure' if errors exist."""
        return "success" if len(self.errors) == 0 else "failure"

    def has_errors(self) -> bool:
        return len(self.errors) > 0

    def has_warnings(self) -> bool:
        return len(self.warnings) > 0

    @property
    def fully_unital(self) -> bool:
        return all(self.unital.values())


@dataclass(frozen=True)
class RewriteStep:
    """One redundancy elimination: q is absorbed into q_bar through j."""
    q: str
    q_bar: str
    j: str
    r: int
    s: int

    @property
    def case(self) -> str:
        """'00' when both ends are glued on the same side, '01' otherwise."""
        return "00" if self.r == self.s else "01"


@dataclass
class Summand:
    """A direct summand of NCCW data together with the labels it keeps."""
    data: NccwData
    p_labels: List[str]
    i_labels: List[str]


@dataclass(frozen=True)
class ConjugacyCertificate:
    """
    Explicit conjugacy between (A, B_sigma) and (A', B_tau).

    Attributes:
        rho: p -> rho(p), permutation of the block labels
        kappa: i -> kappa(i)
        theta: y -> Theta(y), bijections Y^p -> Y^rho(p)
        xi: x -> Xi(x), bijections X^i -> X^kappa(i)
        orientation: p -> +1 or -1
    """
    rho: Dict[str, str]
    kappa: Dict[str, str]
    theta: Dict[Hashable, Hashable]
    xi: Dict[Hashable, Hashable]
    orientation: Dict[str, int]


class Verdict(str, Enum):
    """Outcome of a conjugacy decision."""
    CONJUGATE = "conjugate"
    NOT_CONJUGATE = "not_conjugate"


@dataclass
class Decision:
    """
    Conjugacy decision with either a certificate or an obstruction.

    The certificate refers to the reduced instances stored alongside it.
    """
    verdict: Verdict
    method: str
    certificate: Optional[ConjugacyCertificate] = None
    obstruction: Optional[str] = None
    reduced: Optional[Tuple[Any, Any, Any, Any]] = None

    @property
    def conjugate(self) -> bool:
        return self.verdict == Verdict.CONJUGATE


@dataclass(frozen=True)
class CongruenceWitness:
    """M_sigma[a][b] == M[rows[a]][cols[b]] where M is M_tau or its transpose."""
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    transposed: bool


@dataclass
class CongruenceResult:
    congruent: bool
    witness: Optional[CongruenceWitness] = None
    reason: Optional[str] = None


@dataclass
class RigidityReport:
    """Hypotheses of the two rigidity theorems, with failing bullets in ``details``."""
    abbz: bool
    abb: bool
    details: List[str] = field(default_factory=list)


@dataclass
class AppBRInstance:
    """
    Pair of twists on a dimension-drop model whose spectra agree but whose diagonals differ.

    Attributes:
        m: nu x nu 0/1 matrix with delta ones per row and column
        m_sigma: diag(c*M, c*M)
        m_tau: diag(c*M, (c*M)^t)
        factor: c = 2*nu/delta
    """
    nu: int
    delta: int
    m: Any
    m_sigma: Any
    m_tau: Any
    factor: int
    data: NccwData
    sigma: Any
    tau: Any


@dataclass
class RunManifest:
    """
    Everything that determines a command-line run's outputs.

    Attributes:
        command: subcommand name
        inputs: input file paths
        toggles: tower toggles in effect
        seed: seed for randomized sweeps
        output_dir: directory receiving the artifacts
        options: remaining command options
    """
    command: str
    inputs: List[str] = field(default_factory=list)
    toggles: List[str] = field(default_factory=list)
    seed: int = 0
    output_dir: str = "out"
    options: Dict[str, Any] = field(default_factory=dict)
