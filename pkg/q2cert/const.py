"""The q2cert constants."""

from __future__ import annotations

from enum import StrEnum
from typing import Final

SCHEMA_VERSION: Final = "q2cert/1"
ENV_PREFIX: Final = "Q2CERT_"

MAX_VERTICES: Final = 64
GRAPH6_HEADER: Final = b">>graph6<<"

# ---- Tolerance ladder ---------------------------------------------------------

TOL_RESIDUAL: Final[float] = 1e-10  # accept ‖A² − I‖ and lift residuals below this
TOL_RANK: Final[float] = 1e-8  # relative singular-value cut for SSP rank
NONZERO_FLOOR: Final[float] = 1e-6  # new entries produced by search or lifting
PATTERN_FLOOR: Final[float] = 1e-8  # an edge entry must exceed this to count as nonzero
ZERO_CEILING: Final[float] = 1e-12  # a non-edge entry must stay below this
CLUSTER_TOL: Final[float] = 1e-8  # eigenvalues closer than this (relative) coincide
AMBIGUITY_FACTOR: Final[float] = 10.0
SPECTRUM_MATCH_TOL: Final[float] = 1e-9

DEFAULT_RESTARTS: Final = 200
DEFAULT_SEED: Final = 0

# ---- Enumerations -------------------------------------------------------------


class Verdict(StrEnum):
    """Outcome of classifying a graph."""

    Q2 = "Q2"
    Q3 = "Q3"
    UNKNOWN = "Unknown"


class RouteTag(StrEnum):
    """Rules a certificate's route may reference."""

    COMPLETE = "Complete"
    LB1 = "LB1"
    NGTHM = "NGThm"
    BOX_PRODUCT = "BoxProduct"
    TIGHT_CHAR = "TightChar"
    M7_ROUTE = "M7Route"
    WHAT_ROUTE = "WHatRoute"
    TRI_CYC = "TriCyc"
    K3BAR_JOIN = "K3BarJoin"
    JOIN_CLIQUE = "JoinClique"
    K2_JOIN = "K2Join"
    JDUP = "Jdup"
    LIFT = "Lift"
    SEARCH = "Search"
    UNIQUE_P2 = "UniqueP2"


class Construction(StrEnum):
    """Provenance of a realization matrix."""

    M7 = "M7"
    ORTHO_COMPLETE = "OrthoComplete"
    BOX_K2 = "BoxK2"
    WHAT = "WHat"
    CYCLE_REP = "CycleRep"
    TRI_CYC = "TriCyc"
    K3BAR_JOIN = "K3BarJoin"
    LIFT = "Lift"
    JDUP = "Jdup"
    SEARCH = "Search"
    DIAGONAL = "Diagonal"


class ArithmeticMode(StrEnum):
    """Arithmetic a verification ran in."""

    EXACT = "exact"
    FLOATING = "floating"


# The displayed 7×7 matrix realizing H₇ with two eigenvalues and the SSP.
M7_ENTRIES: Final[tuple[tuple[int, ...], ...]] = (
    (3, 1, 1, 1, 0, 0, 0),
    (1, 1, 0, 0, 1, -1, 0),
    (1, 0, 1, 0, -1, 0, 1),
    (1, 0, 0, 1, 0, 1, -1),
    (0, 1, -1, 0, 2, -1, -1),
    (0, -1, 0, 1, -1, 2, -1),
    (0, 0, 1, -1, -1, -1, 2),
)

# Seed rows of the orthogonal representation of a cycle complement.
CYCLE_SEED_ROWS: Final[tuple[tuple[int, int, int], ...]] = (
    (1, 1, 2),
    (1, 3, -2),
    (-1, 1, 1),
)

# Rotations with rational cosine and sine, used for exact joined duplication.
PYTHAGOREAN_ROTATIONS: Final[tuple[tuple[int, int, int], ...]] = (
    (3, 4, 5),
    (5, 12, 13),
    (8, 15, 17),
    (7, 24, 25),
    (20, 21, 29),
)

ALPHA_DENOMINATOR: Final = 17
