"""Evolution metrics over corrected data and network snapshots.

rq1  active API/mashup counts under three death scenarios
rq2  A-A degree distributions and power-law plausibility
rq3  category diversity of the C-C network
rq4  connected components of the A-A network
rq5  survival of mashups using co-occurring API pairs
rq6  mashup composition size
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .components import UnionFind
from .correction import DEFAULT_BETA, CorrectedDataset
from .dates import DateLike, iso, period_starts, to_day
from .networks import AASnapshot, CCSnapshot
from .powerlaw import PowerLawError, fit_power_law, pvalue_bootstrap

SCENARIOS = ("no_death", "deathpool", "corrected")
SURVIVAL_BUCKET = 20


@dataclass(frozen=True)
class TimeSeries:
    label: str
    points: tuple[tuple[int, float], ...]
    scenario: str | None = None

    def __post_init__(self):
        ts = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("time points must be strictly increasing")

    @property
    def t(self) -> np.ndarray:
        return np.array([t for t, _ in self.points], dtype=np.int64)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points], dtype=float)


def default_range(corrected: CorrectedDataset) -> tuple[int, int]:
    starts = [r.start for r in corrected.dataset]
    if not starts:
        raise ValueError("empty dataset has no natural range")
    ends = [lc.end for lc in corrected.lifecycles.values() if lc.end is not None]
    beta = to_day(corrected.meta.get("beta") or DEFAULT_BETA)
    return min(starts), max([beta, *ends])


# ------------------------------------------------------------------ RQ1

def scenario_end(corrected: CorrectedDataset, rec, scenario: str) -> int | None:
    if scenario == "no_death":
        return None
    if scenario == "deathpool":
        return rec.deathpool_date
    if scenario == "corrected":
        return corrected.lifecycles[rec.id].end
    raise ValueError(f"unknown scenario {scenario!r}")


def active_counts(starts, ends, days) -> np.ndarray:
    """Number of ``[start, end)`` intervals containing each day.

    ``end`` of ``None`` is open; ``end <= start`` means never active.
    """
    s = np.asarray(starts, dtype=np.int64)
    e = np.array([np.iinfo(np.int64).max if x is None else x for x in ends], dtype=np.int64)
    e = np.maximum(e, s)
    s.sort()
    e.sort()
    days = np.asarray(days, dtype=np.int64)
    return np.searchsorted(s, days, side="right") - np.searchsorted(e, days, side="right")


def rq1_counts(
    corrected: CorrectedDataset,
    cadence: str = "daily",
    scenario: str = "corrected",
    range: tuple[DateLike, DateLike] | None = None,
) -> dict[str, TimeSeries]:
    """Active entity counts per kind at each period start."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    ds = corrected.dataset
    if range is None:
        if not len(ds):
            return {k: TimeSeries(k, (), scenario) for k in ("api", "mashup")}
        range = default_range(corrected)
    days = period_starts(range[0], range[1], cadence)
    out = {}
    for kind, recs in (("api", ds.apis.values()), ("mashup", ds.mashups.values())):
        recs = list(recs)
        counts = active_counts([r.start for r in recs],
                               [scenario_end(corrected, r, scenario) for r in recs], days)
        out[kind] = TimeSeries(kind, tuple(zip(days, counts.tolist())), scenario)
    return out


# ------------------------------------------------------------------ RQ2

def degree_distribution(aa: AASnapshot) -> dict[int, int]:
    """Histogram of distinct-neighbour degree; isolated nodes count at 0."""
    adj = aa.adjacency()
    return dict(sorted(Counter(len(v) for v in adj.values()).items()))


def positive_degrees(aa: AASnapshot) -> list[int]:
    return sorted(len(v) for v in aa.adjacency().values() if v)


@dataclass(frozen=True)
class DegreeFitRow:
    t: int
    n_nodes: int
    alpha: float | None
    xmin: int | None
    ks: float | None
    p_value: float | None
    n_tail: int | None
    low_confidence: bool
    error: str | None = None


def rq2_power_law(series: Sequence[tuple[int, AASnapshot, CCSnapshot]], n_boot: int = 1000,
                  seed: int = 0, workers: int = 1) -> list[DegreeFitRow]:
    rows = []
    for i, (t, aa, _) in enumerate(series):
        deg = positive_degrees(aa)
        try:
            fit = fit_power_law(deg)
            fit = pvalue_bootstrap(fit, deg, n_boot=n_boot, seed=seed + i,
                                   workers=workers)
        except PowerLawError as exc:
            rows.append(DegreeFitRow(t, len(deg), None, None, None, None, None, False, exc.code))
            continue
        rows.append(DegreeFitRow(t, len(deg), fit.alpha, fit.xmin, fit.ks, fit.p_value,
                                 fit.n_tail, fit.low_confidence))
    return rows


# ------------------------------------------------------------------ RQ3

def rq3_diversity(cc_series: Iterable[tuple[int, CCSnapshot]] | Iterable[CCSnapshot]):
    """Category count per snapshot and a per-snapshot popularity table.

    The table rows are ``(t, category, api_count, rank)`` with rank 1 for
    the category aggregating the most APIs.
    """
    points, table = [], []
    for item in cc_series:
        cc = item[-1] if isinstance(item, tuple) else item
        points.append((cc.t, len(cc.nodes)))
        ranked = sorted(cc.node_sizes.items(), key=lambda kv: (-kv[1], kv[0]))
        for rank, (cat, n) in enumerate(ranked, 1):
            table.append((cc.t, cat, n, rank))
    return TimeSeries("diversity", tuple(points)), table


# ------------------------------------------------------------------ RQ4

@dataclass(frozen=True)
class ComponentStats:
    component_count: int
    count_size_gt_4: int
    largest_component_size: int

    def __iter__(self):
        return iter((self.component_count, self.count_size_gt_4, self.largest_component_size))


def rq4_components(aa: AASnapshot, include_isolated: bool = True) -> ComponentStats:
    uf = UnionFind(sorted(aa.nodes) if include_isolated else ())
    for u, v, _ in aa.edges:
        uf.union(u, v)
    sizes = uf.component_sizes()
    return ComponentStats(len(sizes), sum(s > 4 for s in sizes), sizes[0] if sizes else 0)


# ------------------------------------------------------------------ RQ5

@dataclass(frozen=True)
class PairSurvivalStat:
    api_a: str
    api_b: str
    total_use: int
    active_use: int
    avg_days: float

    def __post_init__(self):
        if not 0 <= self.active_use <= self.total_use:
            raise ValueError("active_use must lie in [0, total_use]")

    @property
    def survival_rate(self) -> float:
        return self.active_use / self.total_use if self.total_use else 0.0


def rq5_pair_survival(corrected: CorrectedDataset, reference_date: DateLike | None = None
                      ) -> list[PairSurvivalStat]:
    """Per API pair: mashups ever co-invoking it and how many are alive at the reference date.

    ``avg_days`` is the mean mashup longevity, alive mashups clipped at the
    reference date. Sorted by total use (desc), then pair.
    """
    ref = to_day(reference_date if reference_date is not None
                 else corrected.meta.get("beta") or DEFAULT_BETA)
    users: dict[tuple[str, str], list[str]] = defaultdict(list)
    for mid, tl in corrected.timelines.items():
        lc = corrected.lifecycles[mid]
        if lc.start > ref:
            continue
        pairs = set()
        for seg in tl.segments:
            if seg.start > ref:
                break
            pairs.update(combinations(sorted(seg.api_ids), 2))
        for p in pairs:
            users[p].append(mid)
    out = []
    for (a, b), mids in users.items():
        lcs = [corrected.lifecycles[m] for m in mids]
        alive = sum(lc.active(ref) for lc in lcs)
        days = [min(lc.end, ref) - lc.start if lc.end is not None else ref - lc.start
                for lc in lcs]
        out.append(PairSurvivalStat(a, b, len(mids), alive, float(np.mean(days))))
    out.sort(key=lambda s: (-s.total_use, s.api_a, s.api_b))
    return out


def survival_curve(stats: Iterable[PairSurvivalStat], width: int = SURVIVAL_BUCKET):
    """``(lo, hi, n_pairs, mean_survival_rate)`` per total-use bucket ``[lo, hi)``."""
    buckets: dict[int, list[float]] = defaultdict(list)
    for s in stats:
        buckets[(s.total_use // width) * width].append(s.survival_rate)
    return [(lo, lo + width, len(r), float(np.mean(r))) for lo, r in sorted(buckets.items())]


# ------------------------------------------------------------------ RQ6

@dataclass(frozen=True)
class SizeStats:
    t: int
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float

    def __post_init__(self):
        if not self.min <= self.q1 <= self.median <= self.q3 <= self.max:
            raise ValueError("box statistics out of order")


def size_stats(t: int, sizes: Sequence[float]) -> SizeStats:
    """Box statistics; quartiles by linear interpolation between order statistics."""
    x = np.asarray(sizes, dtype=float)
    q1, med, q3 = np.percentile(x, [25, 50, 75], method="linear")
    return SizeStats(t, int(x.size), float(x.min()), float(q1), float(med), float(q3),
                     float(x.max()), float(x.mean()))


def rq6_size_stats(
    corrected: CorrectedDataset,
    cadence: str = "yearly",
    population: str = "new_only",
    range: tuple[DateLike, DateLike] | None = None,
) -> list[SizeStats]:
    """Composition-size box statistics per period.

    ``new_only`` groups mashups by creation period using their submitted
    composition; ``all_active`` measures the composition in force at each
    period start for every active mashup (functionally dead ones excluded).
    Periods without mashups are omitted.
    """
    ds = corrected.dataset
    if not ds.mashups:
        return []
    if range is None:
        range = default_range(corrected)
    periods = period_starts(range[0], range[1], cadence)
    rows = []
    if population == "new_only":
        bounds = periods + [to_day(range[1]) + 1]
        groups: dict[int, list[int]] = defaultdict(list)
        for m in ds.mashups.values():
            i = int(np.searchsorted(bounds, m.start, side="right")) - 1
            if 0 <= i < len(periods) and m.api_ids:
                groups[periods[i]].append(len(set(m.api_ids)))
        for t in periods:
            if groups.get(t):
                rows.append(size_stats(t, groups[t]))
    elif population == "all_active":
        for t in periods:
            sizes = []
            for mid, tl in corrected.timelines.items():
                if not corrected.lifecycles[mid].active(t):
                    continue
                seg = tl.at(t)
                if seg is not None and seg.api_ids:
                    sizes.append(len(seg.api_ids))
            if sizes:
                rows.append(size_stats(t, sizes))
    else:
        raise ValueError(f"unknown population {population!r}")
    return rows


def omitted_periods(rows: Sequence[SizeStats], periods: Sequence[int]) -> list[str]:
    have = {r.t for r in rows}
    return [iso(t) for t in periods if t not in have]
