"""Lifecycle correction: death-time estimation and composition repair.

Longevities of trusted deathpool entries are fitted with a normal
distribution (maximum likelihood: sample mean and the biased ``1/n``
variance). Each unavailable entity without a trusted death date then gets a
sampled longevity ``d``; its end is ``start + d`` unless that lands after the
confirmation date ``beta``, in which case the end is drawn uniformly between
``start`` and ``beta``. Split or transferred APIs end when their last
successor appears.

Mashup compositions are replayed through API end events: a dead API is
removed, a transferred one replaced by its successor, a split one by all of
its successors.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dataset import (
    DEFAULT_TRUST_WINDOW, IMPLAUSIBLE_DEATH, Dataset, from_records, record_from_dict,
    record_to_dict,
)
from .dates import DateLike, iso, to_day
from .liveness import LivenessVerdict

log = logging.getLogger(__name__)

DEFAULT_BETA = to_day("2020-09-10")
MIN_LONGEVITY = 1

OBSERVED = "observed_deathpool"
SAMPLED = "sampled"
DERIVED = "derived_successor"
ALIVE = "alive"
PROVENANCES = (OBSERVED, SAMPLED, DERIVED, ALIVE)

Z_BANDS = ((2.0, "same"), (2.5, "marginal"), (3.0, "significant"))

_STD_NORMAL = NormalDist()


class CorrectionError(Exception):
    pass


# ------------------------------------------------------------- fitting

@dataclass(frozen=True)
class NormalFit:
    mu_hat: float
    sigma2_hat: float
    n: int

    def __post_init__(self):
        if self.sigma2_hat < 0:
            raise ValueError("negative variance")
        if self.n < 2:
            raise ValueError("a fit needs at least two samples")

    @property
    def sigma_hat(self) -> float:
        return math.sqrt(self.sigma2_hat)

    def to_dict(self):
        return {"mu_hat": self.mu_hat, "sigma2_hat": self.sigma2_hat, "n": self.n}


def fit_normal_mle(samples: Iterable[float]) -> NormalFit:
    """Maximum-likelihood normal fit (biased variance, divides by ``n``)."""
    x = np.asarray(list(samples), dtype=float)
    if x.size < 2:
        raise CorrectionError(f"need at least 2 samples, got {x.size}")
    if np.any(x < 0):
        raise CorrectionError("longevity samples must be non-negative")
    mu = float(np.mean(x))
    s2 = float(np.mean((x - mu) ** 2))
    if s2 == 0.0:
        warnings.warn("all samples equal; variance is zero", RuntimeWarning, stacklevel=2)
    return NormalFit(mu, s2, int(x.size))


@dataclass(frozen=True)
class ZTest:
    z: float
    band: str

    def __iter__(self):
        return iter((self.z, self.band))


def z_band(z: float) -> str:
    for limit, name in Z_BANDS:
        if z < limit:
            return name
    return "highly_significant"


def z_test(fit_a: NormalFit, fit_b: NormalFit) -> ZTest:
    """``|mu_a - mu_b| / sqrt(var_a + var_b)`` and its qualitative band."""
    diff = abs(fit_a.mu_hat - fit_b.mu_hat)
    var = fit_a.sigma2_hat + fit_b.sigma2_hat
    if var == 0.0:
        z = 0.0 if diff == 0.0 else math.inf
    else:
        z = diff / math.sqrt(var)
    return ZTest(z, z_band(z))


# ------------------------------------------------------------ lifecycles

@dataclass(frozen=True)
class LifecycleEstimate:
    entity_id: str
    start: int
    end: int | None
    provenance: str
    beta: int
    drawn_days: int | None = None  # only for sampled estimates

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.end is None:
            if self.provenance != ALIVE:
                raise ValueError("only alive estimates may lack an end")
            return
        if self.end <= self.start:
            raise ValueError(f"{self.entity_id}: end {self.end} not after start {self.start}")
        if self.provenance == SAMPLED and self.end > self.beta:
            raise ValueError(f"{self.entity_id}: sampled end after beta")

    def active(self, t: int) -> bool:
        return self.start <= t and (self.end is None or t < self.end)

    @property
    def longevity(self) -> int | None:
        return None if self.end is None else self.end - self.start

    def to_dict(self):
        d = {
            "id": self.entity_id,
            "start": iso(self.start),
            "end": iso(self.end),
            "provenance": self.provenance,
            "beta": iso(self.beta),
        }
        if self.drawn_days is not None:
            d["drawn_days"] = self.drawn_days
        return d


def draw_longevity(fit: NormalFit, rng: np.random.Generator) -> int:
    """Longevity in whole days from the fit, truncated below at one day."""
    if fit.sigma2_hat == 0.0:
        return max(MIN_LONGEVITY, int(math.floor(fit.mu_hat + 0.5)))
    sigma = fit.sigma_hat
    # sample x > a by inverting the lower tail of -x, which keeps precision
    a = (MIN_LONGEVITY - fit.mu_hat) / sigma
    tail = _STD_NORMAL.cdf(-a)
    if tail <= 0.0:
        return MIN_LONGEVITY
    v = (1.0 - rng.random()) * tail
    x = -_STD_NORMAL.inv_cdf(min(v, 1.0 - 1e-16))
    d = fit.mu_hat + sigma * max(x, a)
    return max(MIN_LONGEVITY, int(math.floor(d + 0.5)))


def late_branch_probability(fit: NormalFit, window: int) -> float:
    """P(drawn longevity > ``window`` days) under :func:`draw_longevity`."""
    if fit.sigma2_hat == 0.0:
        return float(max(MIN_LONGEVITY, math.floor(fit.mu_hat + 0.5)) > window)
    lo = max(window + 0.5, MIN_LONGEVITY)
    sigma = fit.sigma_hat
    num = _STD_NORMAL.cdf((fit.mu_hat - lo) / sigma)
    den = _STD_NORMAL.cdf((fit.mu_hat - MIN_LONGEVITY) / sigma)
    return num / den


def sample_death_time(
    start: DateLike,
    beta: DateLike,
    fit: NormalFit,
    rng: np.random.Generator,
    entity_id: str = "",
) -> LifecycleEstimate:
    """Sampled end of life for an entity confirmed dead by ``beta``."""
    start, beta = to_day(start), to_day(beta)
    if start >= beta:
        raise CorrectionError(f"{entity_id or 'entity'}: start {iso(start)} not before beta {iso(beta)}")
    d = draw_longevity(fit, rng)
    if start + d <= beta:
        end = start + d
    elif beta - start >= 2:
        end = int(rng.integers(start + 1, beta))
    else:
        end = beta
    return LifecycleEstimate(entity_id, start, end, SAMPLED, beta, d)


def successor_end_time(api_start_dates: Sequence[DateLike]) -> int:
    if not api_start_dates:
        raise CorrectionError("successor list is empty")
    return max(to_day(d) for d in api_start_dates)


# ------------------------------------------------------------ compositions

DEATH, TRANSFER, SPLIT = "death", "transfer", "split"
_PATTERN_OF_VERDICT = {"dead": DEATH, "transfer": TRANSFER, "split": SPLIT,
                       "unreachable": DEATH, "replaced": DEATH}


@dataclass(frozen=True)
class ApiEvent:
    api_id: str
    pattern: str = DEATH
    successors: tuple[str, ...] = ()

    def __post_init__(self):
        if self.pattern not in (DEATH, TRANSFER, SPLIT):
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.pattern == TRANSFER and len(self.successors) != 1:
            raise ValueError("transfer needs exactly one successor")
        if self.pattern == SPLIT and len(self.successors) < 2:
            raise ValueError("split needs two or more successors")

    def apply(self, apis: frozenset[str]) -> frozenset[str]:
        return (apis - {self.api_id}) | frozenset(self.successors)


@dataclass(frozen=True)
class Segment:
    start: int
    end: int | None
    api_ids: frozenset[str]

    @property
    def functionally_dead(self) -> bool:
        return not self.api_ids

    def active(self, t: int) -> bool:
        return self.start <= t and (self.end is None or t < self.end)

    def to_dict(self):
        return {"from": iso(self.start), "to": iso(self.end),
                "api_ids": sorted(self.api_ids),
                "functionally_dead": self.functionally_dead}


@dataclass(frozen=True)
class CompositionTimeline:
    mashup_id: str
    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = self.segments
        if not segs:
            raise ValueError("timeline needs a segment")
        for a, b in zip(segs, segs[1:]):
            if a.end != b.start:
                raise ValueError("segments must be contiguous")
            if a.end <= a.start:
                raise ValueError("empty segment")

    @classmethod
    def initial(cls, mashup_id: str, apis: Iterable[str], start: DateLike,
                end: DateLike | None = None) -> "CompositionTimeline":
        return cls(mashup_id, (Segment(to_day(start), None if end is None else to_day(end),
                                       frozenset(apis)),))

    @property
    def current(self) -> Segment:
        return self.segments[-1]

    def at(self, t: int) -> Segment | None:
        for s in self.segments:
            if s.active(t):
                return s
        return None

    def sets(self) -> list[frozenset[str]]:
        return [s.api_ids for s in self.segments]

    def to_dict(self):
        return {"mashup_id": self.mashup_id, "segments": [s.to_dict() for s in self.segments]}


def correct_composition(timeline: CompositionTimeline, event: ApiEvent, t: DateLike
                        ) -> CompositionTimeline:
    """Close the current segment at ``t`` and open one with ``event`` applied.

    An event at the current segment's own start rewrites that segment in
    place, so simultaneous events never produce zero-length segments.
    """
    t = to_day(t)
    cur = timeline.current
    if event.api_id not in cur.api_ids:
        log.warning("%s: %s not in current composition; event ignored",
                    timeline.mashup_id, event.api_id)
        return timeline
    if t < cur.start:
        raise CorrectionError(f"event at {iso(t)} precedes current segment start {iso(cur.start)}")
    if cur.end is not None and t >= cur.end:
        raise CorrectionError(f"event at {iso(t)} after the mashup's end {iso(cur.end)}")
    new_set = event.apply(cur.api_ids)
    if t == cur.start:
        segs = timeline.segments[:-1] + (replace(cur, api_ids=new_set),)
    else:
        segs = timeline.segments[:-1] + (replace(cur, end=t), Segment(t, cur.end, new_set))
    return CompositionTimeline(timeline.mashup_id, segs)


def replay_composition(
    mashup_id: str,
    api_ids: Iterable[str],
    start: int,
    end: int | None,
    events: Sequence[tuple[int, ApiEvent]],
    api_end: Mapping[str, int | None] | None = None,
    api_event: Mapping[str, ApiEvent] | None = None,
) -> CompositionTimeline:
    """Rebuild a mashup's timeline from chronologically sorted API end events.

    Events dated before the mashup's creation are applied at creation.
    Successors that already ended by the event date are expanded through
    their own events (``api_end``/``api_event``).
    """
    api_end = api_end or {}
    api_event = api_event or {}

    def resolve(api, t, seen):
        e = api_end.get(api)
        if e is None or e > t or api in seen:
            return {api}
        ev = api_event.get(api)
        if ev is None:
            return set()
        out = set()
        for s in ev.successors:
            out |= resolve(s, t, seen | {api})
        return out

    tl = CompositionTimeline.initial(mashup_id, api_ids, start, end)
    for t, ev in events:
        if end is not None and t >= end:
            break
        if ev.api_id not in tl.current.api_ids:
            continue
        teff = max(t, start)
        succ: set[str] = set()
        for s in ev.successors:
            succ |= resolve(s, teff, frozenset({ev.api_id}))
        tl = correct_composition(tl, _as_event(ev.api_id, succ), teff)
    return tl


def _as_event(api_id, successors) -> ApiEvent:
    succ = tuple(sorted(successors))
    if not succ:
        return ApiEvent(api_id, DEATH)
    return ApiEvent(api_id, TRANSFER if len(succ) == 1 else SPLIT, succ)


# ----------------------------------------------------------------- batch

@dataclass(frozen=True)
class CorrectedDataset:
    dataset: Dataset
    lifecycles: Mapping[str, LifecycleEstimate]
    timelines: Mapping[str, CompositionTimeline]
    flags: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    meta: Mapping[str, object] = field(default_factory=dict)

    def lifecycle(self, entity_id: str) -> LifecycleEstimate:
        return self.lifecycles[entity_id]


def entity_rng(seed: int, entity_id: str) -> np.random.Generator:
    """Generator derived from (seed, id), independent of processing order."""
    h = int.from_bytes(hashlib.sha256(entity_id.encode("utf-8")).digest()[:8], "big")
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, h])


def _fit_for(fit, kind):
    if isinstance(fit, NormalFit):
        return fit
    return fit.get(kind) or fit["all"]


def apply_corrections(
    ds: Dataset,
    verdicts: Mapping[str, LivenessVerdict],
    fit: NormalFit | Mapping[str, NormalFit],
    seed: int,
    beta: DateLike = DEFAULT_BETA,
    trust_window: tuple[DateLike, DateLike] = DEFAULT_TRUST_WINDOW,
) -> CorrectedDataset:
    """Estimate a lifecycle for every entity and rebuild mashup timelines.

    ``fit`` is one pooled fit or a mapping ``{"api": ..., "mashup": ...}``
    (``"all"`` as fallback). Per-entity problems are recorded in ``flags``.
    """
    beta = to_day(beta)
    lo, hi = to_day(trust_window[0]), to_day(trust_window[1])
    missing = [r.id for r in ds if r.id not in verdicts]
    if missing:
        raise CorrectionError(f"no verdict for {len(missing)} entities, e.g. {missing[0]!r}")

    flags: dict[str, list[str]] = {}
    lifecycles: dict[str, LifecycleEstimate] = {}

    def flag(eid, what):
        flags.setdefault(eid, []).append(what)

    def sample(rec):
        rng = entity_rng(seed, rec.id)
        b = beta
        if rec.start >= b:
            flag(rec.id, "start_not_before_beta")
            b = rec.start + 1
        return sample_death_time(rec.start, b, _fit_for(fit, rec.kind), rng, rec.id)

    for rec in ds:
        v = verdicts[rec.id]
        if v.available:
            lifecycles[rec.id] = LifecycleEstimate(rec.id, rec.start, None, ALIVE, beta)
            continue
        dp = rec.deathpool_date
        if (dp is not None and lo <= dp <= hi and dp > rec.start
                and IMPLAUSIBLE_DEATH not in ds.flags(rec.id)):
            lifecycles[rec.id] = LifecycleEstimate(rec.id, rec.start, dp, OBSERVED, beta)
            continue
        if v.verdict in ("transfer", "split"):
            starts = [ds.apis[s].start for s in v.successor_ids if s in ds.apis]
            if not starts:
                flag(rec.id, "successor_unknown")
            else:
                end = successor_end_time(starts)
                if end > rec.start:
                    lifecycles[rec.id] = LifecycleEstimate(rec.id, rec.start, end, DERIVED, beta)
                    continue
                flag(rec.id, "successor_predates_start")
        lifecycles[rec.id] = sample(rec)

    api_end = {a: lifecycles[a].end for a in ds.apis}
    api_event: dict[str, ApiEvent] = {}
    for a in ds.apis:
        if api_end[a] is None:
            continue
        v = verdicts[a]
        pattern = _PATTERN_OF_VERDICT.get(v.verdict, DEATH)
        api_event[a] = ApiEvent(a, pattern, v.successor_ids if pattern != DEATH else ())
    events = sorted(((api_end[a], ev) for a, ev in api_event.items()),
                    key=lambda p: (p[0], p[1].api_id))

    timelines = {}
    for m in ds.mashups.values():
        lc = lifecycles[m.id]
        apis = [a for a in m.api_ids if a in ds.apis]
        timelines[m.id] = replay_composition(m.id, apis, lc.start, lc.end, events,
                                             api_end, api_event)
        if timelines[m.id].current.functionally_dead:
            flag(m.id, "functionally_dead")

    meta = {
        "seed": int(seed), "beta": iso(beta), "trust_window": [iso(lo), iso(hi)],
        "fit": (fit.to_dict() if isinstance(fit, NormalFit)
                else {k: f.to_dict() for k, f in sorted(fit.items())}),
    }
    return CorrectedDataset(ds, lifecycles, timelines,
                            {k: tuple(v) for k, v in flags.items()}, meta)


# ---------------------------------------------------------------- I/O

def write_corrected(cd: CorrectedDataset, path) -> None:
    """Self-contained JSON-lines: meta, source records, lifecycles, timelines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        def emit(obj):
            fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")

        emit({"record": "meta", **cd.meta})
        for rec in cd.dataset:
            emit({"record": "source", **record_to_dict(rec)})
        for rec in cd.dataset:
            lc = cd.lifecycles[rec.id]
            row = {"record": "entity", "kind": rec.kind, **lc.to_dict()}
            if rec.id in cd.flags:
                row["flags"] = list(cd.flags[rec.id])
            emit(row)
        for mid in cd.dataset.mashups:
            emit({"record": "timeline", **cd.timelines[mid].to_dict()})


def read_corrected(path) -> CorrectedDataset:
    meta, records, lifecycles, timelines, flags = {}, [], {}, {}, {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            kind = row.pop("record")
            if kind == "meta":
                meta = row
            elif kind == "source":
                records.append(record_from_dict(row))
            elif kind == "entity":
                end = None if row.get("end") is None else to_day(row["end"])
                lifecycles[row["id"]] = LifecycleEstimate(
                    row["id"], to_day(row["start"]), end, row["provenance"], to_day(row["beta"]),
                    row.get("drawn_days"))
                if row.get("flags"):
                    flags[row["id"]] = tuple(row["flags"])
            elif kind == "timeline":
                segs = tuple(
                    Segment(to_day(s["from"]), None if s.get("to") is None else to_day(s["to"]),
                            frozenset(s["api_ids"]))
                    for s in row["segments"])
                timelines[row["mashup_id"]] = CompositionTimeline(row["mashup_id"], segs)
            else:
                raise CorrectionError(f"unknown record type {kind!r}")
    return CorrectedDataset(from_records(records, str(path)), lifecycles, timelines, flags, meta)
