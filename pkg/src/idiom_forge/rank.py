"""Query vectors and cosine retrieval over the SCS index."""

from __future__ import annotations

import math
from typing import Optional, Sequence

from .extract import ScsGroup, ScsIndex
from .registry import ApiRef, Registry
from .scs import DimensionMismatch, SparseVector

DEFAULT_TOP_K = 100
# scores are compared after rounding so that rescaling a query cannot reorder ties
SCORE_DIGITS = 12


def query_vector(posterior: Sequence[tuple[ApiRef, float]], reg: Registry,
                 top_k: int = DEFAULT_TOP_K) -> SparseVector:
    ranked = sorted(posterior, key=lambda tp: (-tp[1], reg.index_of(tp[0])))
    entries = {}
    for api, p in ranked[:top_k]:
        if p > 0:
            entries[reg.index_of(api)] = float(p)
    return SparseVector(len(reg), entries)


def cosine(a: SparseVector, b: SparseVector) -> float:
    if a.dims != b.dims:
        raise DimensionMismatch(f"{a.dims} != {b.dims}")
    if a.is_zero() or b.is_zero():
        return 0.0
    small, large = (a, b) if len(a.entries) <= len(b.entries) else (b, a)
    dot = sum(w * large.entries.get(i, 0.0) for i, w in small.entries.items())
    return dot / (a.norm * b.norm)


def _rank_key(score: float, g: ScsGroup):
    return (-round(score, SCORE_DIGITS), -g.count, g.key)


def retrieve(qv: SparseVector, index: ScsIndex, m: int,
             tracer: Optional[ApiRef] = None) -> list[tuple[ScsGroup, float]]:
    """Top ``m`` groups by cosine score, then frequency, then canonical form.

    With ``tracer`` only groups containing that API are candidates.  Returned
    scores are rounded the same way the ranking compares them.
    """
    if qv.dims != index.dims:
        raise DimensionMismatch(f"query has {qv.dims} dims, index has {index.dims}")
    if tracer is not None:
        groups = [index.groups[k] for k in index.tracers.get(tracer, ())]
    else:
        groups = list(index.groups.values())
    qnorm = qv.norm
    q = qv.entries
    scored = []
    for g in groups:
        if qnorm == 0.0 or not g.vector.entries:
            score = 0.0
        else:
            dot = sum(w * q.get(i, 0.0) for i, w in g.vector.entries.items())
            score = dot / (qnorm * math.sqrt(sum(w * w for w in g.vector.entries.values())))
        scored.append((g, round(score, SCORE_DIGITS)))
    scored.sort(key=lambda gs: _rank_key(gs[1], gs[0]))
    return scored[:m]
