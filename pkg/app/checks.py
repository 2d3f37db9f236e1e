"""
Check, sector and differential identifiers
------------------------------------------
Names used on the command line, in reports and in the statement manifest.
"""
from typing import Dict, List, Tuple

# --- Sectors ---
EDGE = "edge"  # internal edges
CYCLE = "cycle"  # cycles (closed paths without repeated vertices)
VERTEX = "vertex"  # internal vertices
MIXED = "mixed"  # edges followed by cycles
SECTORS: Tuple[str, ...] = (EDGE, CYCLE, VERTEX, MIXED)

# --- Differential kinds ---
DELTA = "delta"  # 1-mark -> 2-mark
D = "d"  # unmarked, unblocked -> 2-mark
D_TOTAL = "D"  # delta + d
S_SECTOR = "S"  # delta + d restricted to the edge sector
T_SECTOR = "T"  # delta + d restricted to the cycle sector
TOTAL = "total"  # S + (-1)^n T on mixed systems
KINDS: Tuple[str, ...] = (DELTA, D, D_TOTAL, S_SECTOR, T_SECTOR, TOTAL)

# --- Checks ---
ALGEBRA = "algebra"
UNIVERSAL = "universal"
ACYCLIC = "acyclic"
MU = "mu"
COCYCLES = "cocycles"
MAIN = "main"
ORDER = "order"
COMMUTE = "commute"
ALL_CHECKS: Tuple[str, ...] = (ALGEBRA, UNIVERSAL, ACYCLIC, MU, COCYCLES, MAIN, ORDER, COMMUTE)

# --- Sign faults (mutation testing hook) ---
FAULTS: Dict[str, str] = {
    "delta_global": "drop the (-1)^|P_m| prefactor of delta",
    "delta_position": "drop the later-1-marks sign of each delta term",
    "d_position": "drop the earlier-marks sign of each d term",
    "total_sign": "use S + T instead of S + (-1)^n T",
    "sector_signs": "count sector signs over all marked elements in mixed systems",
}

# --- Exit codes ---
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Every in-scope statement must be covered by at least one check.
STATEMENTS: Dict[str, List[str]] = {
    "differentials square to zero and anticommute": [ALGEBRA],
    "marking complexes are modelled by vertex markings of the conflict graph": [UNIVERSAL],
    "delta-only homology is Z in degree 0": [MU],
    "all-marked model complexes are acyclic": [MU],
    "marking complexes are acyclic": [ACYCLIC],
    "exponential generators are cocycles": [COCYCLES],
    "edge and cycle differentials commute": [COMMUTE],
    "total complex cohomology is spanned by the one-mark generators": [MAIN],
    "cohomology does not depend on the element order": [ORDER],
}


def parse_checks(selection: str) -> List[str]:
    """
    Parse a --checks value such as 'all' or 'algebra,order'.

    Raises:
        ValueError: on an unknown check name
    """
    selection = selection.strip()
    if not selection or selection == "all":
        return list(ALL_CHECKS)
    names = [part.strip() for part in selection.split(",") if part.strip()]
    unknown = [name for name in names if name not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"Unknown checks: {', '.join(unknown)} (expected {', '.join(ALL_CHECKS)})")
    # keep canonical order, drop duplicates
    return [name for name in ALL_CHECKS if name in names]
