"""Exact linear algebra for deterministic abelian membership."""
from .intmat import bareiss_det, det_crt, det_lemma, primes_for, solve_integer, woodbury_inverse
from .membership import (
    GuardError,
    LinalgEngine,
    LinearSystem,
    SubmatrixCache,
    build_cache,
    bulk_update,
    encode_system,
    feasible,
    solve_witness,
    zero_extension_witness,
)
from .polymat import char_det_update, char_update, charpoly_adj


def smw_update(entry, U, C, V):
    """Charpoly/adjugate of ``xi I - (M + U C V)`` from the entry for ``M``."""
    C = [[-x for x in row] for row in C]
    return char_update(entry.d, entry.adj, U, C, V)


def det_update(entry, U, V):
    """Charpoly of ``xi I - (M + U V^T)``; ``V`` is given as ``r x t``."""
    Vt = [list(r) for r in zip(*V)]
    Un = [[-x for x in row] for row in U]
    return char_det_update(entry.d, entry.adj, Un, Vt)
