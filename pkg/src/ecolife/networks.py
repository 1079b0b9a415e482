"""Mashup-API dynamic network and its API-API / category-category snapshots.

All intervals are half-open ``[start, end)`` with ``end=None`` meaning the
element is still alive.
"""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from .correction import CorrectedDataset
from .dates import DateLike, iso, period_starts, to_day

log = logging.getLogger(__name__)

UNKNOWN_CATEGORY = "unknown"


def _intersect(*intervals):
    lo = max(s for s, _ in intervals)
    ends = [e for _, e in intervals if e is not None]
    hi = min(ends) if ends else None
    if hi is not None and hi <= lo:
        return None
    return lo, hi


def _active(start: int, end: int | None, t: int) -> bool:
    return start <= t and (end is None or t < end)


@dataclass(frozen=True)
class Node:
    id: str
    start: int
    end: int | None
    category: str

    def active(self, t):
        return _active(self.start, self.end, t)


@dataclass(frozen=True, order=True)
class Edge:
    mashup_id: str
    api_id: str
    start: int
    end: int | None

    def active(self, t):
        return _active(self.start, self.end, t)


@dataclass
class MANetwork:
    api_nodes: dict[str, Node] = field(default_factory=dict)
    mashup_nodes: dict[str, Node] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def category_of(self) -> dict[str, str]:
        return {a: n.category for a, n in self.api_nodes.items()}

    def event_days(self) -> list[int]:
        """Sorted days on which any node or edge starts or ends."""
        days = set()
        for x in [*self.api_nodes.values(), *self.mashup_nodes.values(), *self.edges]:
            days.add(x.start)
            if x.end is not None:
                days.add(x.end)
        return sorted(days)


@dataclass(frozen=True)
class MASnapshot:
    t: int
    apis: frozenset[str]
    mashups: frozenset[str]
    edges: tuple[tuple[str, str], ...]  # (mashup, api), sorted

    def composition(self) -> dict[str, list[str]]:
        comp: dict[str, list[str]] = defaultdict(list)
        for m, a in self.edges:
            comp[m].append(a)
        return comp


@dataclass(frozen=True)
class AASnapshot:
    t: int
    nodes: frozenset[str]
    edges: tuple[tuple[str, str, str], ...]  # (u, v, witness), u < v

    def weights(self) -> Counter:
        return Counter((u, v) for u, v, _ in self.edges)

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v, _ in self.edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        return adj

    def non_isolated(self) -> set[str]:
        return {x for u, v, _ in self.edges for x in (u, v)}


@dataclass(frozen=True)
class CCSnapshot:
    t: int
    weights: Mapping[tuple[str, str], int]
    node_sizes: Mapping[str, int]  # category -> distinct non-isolated APIs
    flags: tuple[str, ...] = ()

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self.node_sizes)

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())


def build_ma(corrected: CorrectedDataset) -> MANetwork:
    """Dynamic bipartite network from corrected lifecycles and timelines.

    Each timeline segment contributes one edge per API, clipped to both
    lifecycles; contiguous pieces of the same (mashup, api) edge are merged.
    """
    ds = corrected.dataset
    net = MANetwork()
    for rec in ds.apis.values():
        lc = corrected.lifecycles[rec.id]
        net.api_nodes[rec.id] = Node(rec.id, lc.start, lc.end, rec.primary_category)
    for rec in ds.mashups.values():
        lc = corrected.lifecycles[rec.id]
        net.mashup_nodes[rec.id] = Node(rec.id, lc.start, lc.end, rec.primary_category)

    for mid in sorted(corrected.timelines):
        m = net.mashup_nodes.get(mid)
        if m is None:
            continue
        pieces: dict[str, list[tuple[int, int | None]]] = defaultdict(list)
        for seg in corrected.timelines[mid].segments:
            for aid in sorted(seg.api_ids):
                a = net.api_nodes.get(aid)
                if a is None:
                    net.flags.append(f"{mid}: no lifecycle for {aid}")
                    continue
                iv = _intersect((seg.start, seg.end), (m.start, m.end), (a.start, a.end))
                if iv is not None:
                    pieces[aid].append(iv)
        for aid in sorted(pieces):
            merged: list[list] = []
            for s, e in sorted(pieces[aid], key=lambda p: p[0]):
                if merged and merged[-1][1] == s:
                    merged[-1][1] = e
                else:
                    merged.append([s, e])
            net.edges.extend(Edge(mid, aid, s, e) for s, e in merged)
    return net


def snapshot_active(net: MANetwork, t: DateLike) -> MASnapshot:
    t = to_day(t)
    apis = frozenset(a for a, n in net.api_nodes.items() if n.active(t))
    mashups = frozenset(m for m, n in net.mashup_nodes.items() if n.active(t))
    edges = tuple(sorted((e.mashup_id, e.api_id) for e in net.edges if e.active(t)))
    return MASnapshot(t, apis, mashups, edges)


def project_aa(ma: MASnapshot) -> AASnapshot:
    """Pair every two APIs of each active mashup, keeping the witness."""
    out = []
    for m, apis in sorted(ma.composition().items()):
        for u, v in combinations(sorted(set(apis)), 2):
            out.append((u, v, m))
    return AASnapshot(ma.t, ma.apis, tuple(out))


def aggregate_cc(aa: AASnapshot, category_of: Mapping[str, str]) -> CCSnapshot:
    """Category co-invocation weights; isolated APIs do not become nodes."""
    flags = []

    def cat(api):
        c = category_of.get(api)
        if not c:
            flags.append(f"no category for {api}")
            return UNKNOWN_CATEGORY
        return c

    weights: Counter = Counter()
    for u, v, _ in aa.edges:
        cu, cv = sorted((cat(u), cat(v)))
        weights[(cu, cv)] += 1
    sizes: Counter = Counter()
    for api in sorted(aa.non_isolated()):
        sizes[cat(api)] += 1
    return CCSnapshot(aa.t, dict(sorted(weights.items())), dict(sorted(sizes.items())),
                      tuple(dict.fromkeys(flags)))


def snapshot_series(
    net: MANetwork,
    cadence: str = "yearly",
    range: tuple[DateLike, DateLike] | None = None,
) -> list[tuple[int, AASnapshot, CCSnapshot]]:
    """(t, A-A, C-C) triples at each period start within ``range``."""
    if range is None:
        days = net.event_days()
        if not days:
            raise ValueError("empty network needs an explicit range")
        range = (days[0], days[-1])
    cats = net.category_of
    out = []
    for t in period_starts(range[0], range[1], cadence):
        aa = project_aa(snapshot_active(net, t))
        out.append((t, aa, aggregate_cc(aa, cats)))
    return out


# ---------------------------------------------------------------- export

def write_aa_edges(series: Iterable[tuple[int, AASnapshot, CCSnapshot]], fh) -> None:
    """Tab-separated ``u  v  w  t`` lines (t as ISO date)."""
    fh.write("# u\tv\tw\tt\n")
    for t, aa, _ in series:
        for u, v, w in aa.edges:
            fh.write(f"{u}\t{v}\t{w}\t{iso(t)}\n")


def write_cc_edges(series: Iterable[tuple[int, AASnapshot, CCSnapshot]], fh) -> None:
    """Tab-separated ``u  v  t  weight`` lines."""
    fh.write("# u\tv\tt\tweight\n")
    for t, _, cc in series:
        for (u, v), wt in cc.weights.items():
            fh.write(f"{u}\t{v}\t{iso(t)}\t{wt}\n")
