import random
from collections import deque

import numpy as np
import pytest

from ecolife.analysis import (
    PairSurvivalStat, SizeStats, active_counts, degree_distribution, omitted_periods,
    positive_degrees, rq1_counts, rq2_power_law, rq3_diversity, rq4_components,
    rq5_pair_survival, rq6_size_stats, size_stats, survival_curve,
)
from ecolife.correction import (
    ALIVE, SAMPLED, CompositionTimeline, CorrectedDataset, LifecycleEstimate,
)
from ecolife.dataset import ApiRecord, MashupRecord, from_records
from ecolife.dates import period_starts, to_day
from ecolife.networks import AASnapshot, CCSnapshot, build_ma, snapshot_series

REF = to_day("2020-09-10")


def _aa(edges, nodes=()):
    nodes = set(nodes) | {x for e in edges for x in e}
    return AASnapshot(0, frozenset(nodes), tuple((u, v, f"w{i}") for i, (u, v) in
                                                  enumerate(sorted(tuple(sorted(e)) for e in edges))))


def _mashups(rows):
    """rows: list of (start, end, api_ids) mashups with static compositions."""
    apis = sorted({a for _, _, ids in rows for a in ids})
    recs = [ApiRecord(a, a, 0, primary_category="Tools") for a in apis]
    lcs = {a: LifecycleEstimate(a, 0, None, ALIVE, REF) for a in apis}
    tls = {}
    for i, (s, e, ids) in enumerate(rows):
        m = f"/mashup/m{i:03d}"
        recs.append(MashupRecord(m, m, s, api_ids=tuple(ids)))
        lcs[m] = LifecycleEstimate(m, s, e, ALIVE if e is None else "observed_deathpool", REF)
        tls[m] = CompositionTimeline.initial(m, ids, s, e)
    return CorrectedDataset(from_records(recs), lcs, tls, meta={"beta": "2020-09-10"})


# ------------------------------------------------------------------ RQ1

def test_active_counts_half_open():
    assert active_counts([0, 5], [10, None], [0, 4, 5, 9, 10, 100]).tolist() == [1, 1, 2, 2, 1, 1]
    assert active_counts([5], [5], [5]).tolist() == [0]


def test_rq1_examples():
    recs = [ApiRecord("/api/a", "A", 0, "deprecated", 100), ApiRecord("/api/b", "B", 50)]
    lcs = {"/api/a": LifecycleEstimate("/api/a", 0, 80, "observed_deathpool", REF),
           "/api/b": LifecycleEstimate("/api/b", 50, 120, SAMPLED, REF)}
    cd = CorrectedDataset(from_records(recs), lcs, {}, meta={"beta": "2020-09-10"})
    days = (0, 200)
    got = {s: rq1_counts(cd, "daily", s, days)["api"] for s in
           ("no_death", "deathpool", "corrected")}
    at = lambda s, t: dict(got[s].points)[t]
    assert [at("no_death", t) for t in (0, 60, 110, 150)] == [1, 2, 2, 2]
    assert [at("deathpool", t) for t in (0, 60, 110, 150)] == [1, 2, 1, 1]
    assert [at("corrected", t) for t in (0, 60, 110, 150)] == [1, 2, 1, 0]
    assert np.all(np.diff(got["no_death"].values) >= 0)
    with pytest.raises(ValueError):
        rq1_counts(cd, scenario="optimistic")


def test_rq1_empty():
    cd = CorrectedDataset(from_records([]), {}, {})
    assert rq1_counts(cd)["api"].points == ()


def test_rq1_brute_force(bundled_corrected):
    cd = bundled_corrected
    series = rq1_counts(cd, "yearly", "corrected", ("2006-01-01", "2020-09-10"))["mashup"]
    for t, v in series.points:
        assert v == sum(cd.lifecycles[m].active(t) for m in cd.dataset.mashups)


# ------------------------------------------------------------------ RQ2

def test_star_degree_histogram():
    aa = _aa([("hub", x) for x in "abcd"], nodes={"lone"})
    assert degree_distribution(aa) == {0: 1, 1: 4, 4: 1}
    assert sum(degree_distribution(aa).values()) == len(aa.nodes)
    assert positive_degrees(aa) == [1, 1, 1, 1, 4]


def test_degree_ignores_witness_multiplicity():
    aa = AASnapshot(0, frozenset("ab"), (("a", "b", "w1"), ("a", "b", "w2")))
    assert degree_distribution(aa) == {1: 2}


def test_rq2_small_snapshot_reports_error():
    rows = rq2_power_law([(0, _aa([("a", "b")]), None)], n_boot=100)
    assert rows[0].error == "no_spread" and rows[0].alpha is None


# ------------------------------------------------------------------ RQ3

def test_rq3_examples():
    cc1 = CCSnapshot(0, {("Mapping", "Social"): 2}, {"Mapping": 2, "Social": 1})
    cc2 = CCSnapshot(1, {}, {})
    ts, table = rq3_diversity([cc1, (1, cc2)])
    assert ts.points == ((0, 2), (1, 0))
    assert table == [(0, "Mapping", 2, 1), (0, "Social", 1, 2)]


def test_rq3_hand_counted(bundled_corrected):
    series = snapshot_series(build_ma(bundled_corrected), "yearly", ("2008-01-01", "2012-01-01"))
    ts, _ = rq3_diversity(series)
    cats = bundled_corrected.dataset.apis
    for (t, aa, _), (_, v) in zip(series, ts.points):
        assert v == len({cats[a].primary_category or "unknown" for a in aa.non_isolated()})


# ------------------------------------------------------------------ RQ4

def _bfs_components(aa, include_isolated=True):
    adj = {n: set() for n in aa.nodes} if include_isolated else {}
    for u, v, _ in aa.edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    seen, sizes = set(), []
    for n in adj:
        if n in seen:
            continue
        seen.add(n)
        q, k = deque([n]), 0
        while q:
            x = q.popleft()
            k += 1
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        sizes.append(k)
    return len(sizes), sum(s > 4 for s in sizes), max(sizes, default=0)


def test_rq4_examples():
    tri = [("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")]
    assert tuple(rq4_components(_aa(tri))) == (2, 0, 3)
    path = [(str(i), str(i + 1)) for i in range(5)]
    assert tuple(rq4_components(_aa(path))) == (1, 1, 6)
    assert tuple(rq4_components(_aa([]))) == (0, 0, 0)
    assert tuple(rq4_components(_aa(path, nodes={"solo"}), include_isolated=False)) == (1, 1, 6)


def random_graph(rng, n_max=200):
    n = rng.randint(1, n_max)
    nodes = [f"v{i}" for i in range(n)]
    m = rng.randint(0, 2 * n)
    edges = [tuple(rng.sample(nodes, 2)) for _ in range(m)] if n > 1 else []
    return _aa(edges, nodes)


@pytest.mark.parametrize("seed", range(20))
def test_rq4_matches_bfs(seed):
    aa = random_graph(random.Random(seed))
    for iso_ in (True, False):
        assert tuple(rq4_components(aa, iso_)) == _bfs_components(aa, iso_)


# ------------------------------------------------------------------ RQ5

def test_rq5_top_pair_rate():
    assert round(PairSurvivalStat("/api/twitter", "/api/google-maps", 185, 63, 1.0)
                 .survival_rate, 2) == 0.34
    with pytest.raises(ValueError):
        PairSurvivalStat("a", "b", 3, 4, 0.0)


def test_rq5_single_alive_mashup():
    cd = _mashups([(100, None, ["/api/a", "/api/b"])])
    (s,) = rq5_pair_survival(cd)
    assert (s.total_use, s.active_use, s.survival_rate) == (1, 1, 1.0)
    assert s.avg_days == REF - 100


def _rq5_brute(cd, ref):
    out = {}
    for m, tl in cd.timelines.items():
        lc = cd.lifecycles[m]
        if lc.start > ref:
            continue
        seen = set()
        for seg in tl.segments:
            if seg.start <= ref:
                for a in seg.api_ids:
                    for b in seg.api_ids:
                        if a < b:
                            seen.add((a, b))
        for p in seen:
            tot, act, days = out.get(p, (0, 0, []))
            end = ref if lc.end is None else min(lc.end, ref)
            out[p] = (tot + 1, act + (lc.start <= ref and (lc.end is None or ref < lc.end)),
                      days + [end - lc.start])
    return out


def _random_mashups(seed, n=30):
    rng = random.Random(seed)
    apis = [f"/api/a{i}" for i in range(8)]
    rows = []
    for _ in range(n):
        s = rng.randint(0, REF - 10)
        e = rng.choice([None, s + rng.randint(1, 4000)])
        rows.append((s, e, rng.sample(apis, rng.randint(1, 4))))
    return _mashups(rows)


@pytest.mark.parametrize("seed", range(5))
def test_rq5_matches_brute_force(seed):
    cd = _random_mashups(seed)
    brute = _rq5_brute(cd, REF)
    got = rq5_pair_survival(cd)
    assert {(s.api_a, s.api_b): (s.total_use, s.active_use) for s in got} == \
        {p: (t, a) for p, (t, a, _) in brute.items()}
    for s in got:
        assert s.avg_days == pytest.approx(np.mean(brute[(s.api_a, s.api_b)][2]))
        assert 0.0 <= s.survival_rate <= 1.0
    assert [s.total_use for s in got] == sorted((s.total_use for s in got), reverse=True)


def test_rq5_uses_every_segment(bundled_corrected):
    tl = bundled_corrected.timelines
    got = {(s.api_a, s.api_b): s.total_use for s in rq5_pair_survival(bundled_corrected)}
    brute = _rq5_brute(bundled_corrected, REF)
    assert got == {p: v[0] for p, v in brute.items()}
    assert any(len(t.segments) > 1 for t in tl.values())


@pytest.mark.parametrize("seed", range(5))
def test_rq5_monotone_under_alive_addition(seed):
    rng = random.Random(seed)
    rows = [(rng.randint(0, 5000), rng.choice([None, 6000]), ["/api/a", "/api/b"])
            for _ in range(rng.randint(1, 10))]
    before = rq5_pair_survival(_mashups(rows))[0].survival_rate
    after = rq5_pair_survival(_mashups(rows + [(100, None, ["/api/a", "/api/b"])]))[0]
    assert after.survival_rate >= before


def test_survival_curve_buckets():
    stats = [PairSurvivalStat("a", f"b{i}", tot, act, 0.0)
             for i, (tot, act) in enumerate([(5, 1), (19, 19), (20, 10), (45, 45)])]
    assert survival_curve(stats) == [(0, 20, 2, pytest.approx(0.6)), (20, 40, 1, 0.5),
                                     (40, 60, 1, 1.0)]


# ------------------------------------------------------------------ RQ6

def test_size_stats_examples():
    s = size_stats(0, [1, 1, 2, 3, 36])
    assert (s.min, s.median, s.max) == (1, 2, 36)
    assert (s.q1, s.q3) == (1, 3)
    s = size_stats(0, [2])
    assert (s.min, s.q1, s.median, s.q3, s.max, s.mean) == (2, 2, 2, 2, 2, 2)
    with pytest.raises(ValueError):
        SizeStats(0, 1, 3, 2, 2, 2, 2, 2)


def _sorted_quantile(xs, q):
    xs = sorted(xs)
    h = (len(xs) - 1) * q
    lo = int(h)
    return xs[lo] + (h - lo) * (xs[min(lo + 1, len(xs) - 1)] - xs[lo])


@pytest.mark.parametrize("seed", range(5))
def test_size_stats_sort_oracle(seed):
    rng = random.Random(seed)
    xs = [rng.randint(1, 12) for _ in range(rng.randint(1, 40))]
    s = size_stats(0, xs)
    for q, got in ((0.25, s.q1), (0.5, s.median), (0.75, s.q3)):
        assert got == pytest.approx(_sorted_quantile(xs, q))
    assert s.min <= s.q1 <= s.median <= s.q3 <= s.max


def test_rq6_populations():
    y = lambda n: to_day(f"{n}-01-01")
    cd = _mashups([(y(2010) + 5, None, ["/api/a", "/api/b"]),
                   (y(2010) + 9, y(2011) + 3, ["/api/a"]),
                   (y(2012) + 1, None, ["/api/a", "/api/b", "/api/c"])])
    rng = (y(2010), y(2013) - 1)
    new = rq6_size_stats(cd, "yearly", "new_only", rng)
    assert [(r.t, r.n, r.median) for r in new] == [(y(2010), 2, 1.5), (y(2012), 1, 3.0)]
    assert omitted_periods(new, period_starts(*rng, "yearly")) == ["2011-01-01"]
    act = rq6_size_stats(cd, "yearly", "all_active", rng)
    assert [(r.t, r.n) for r in act] == [(y(2011), 2), (y(2012), 1)]
    with pytest.raises(ValueError):
        rq6_size_stats(cd, population="everyone")


def test_rq6_box_order_on_bundled(bundled_corrected):
    for pop in ("new_only", "all_active"):
        for r in rq6_size_stats(bundled_corrected, "yearly", pop):
            assert r.min <= r.q1 <= r.median <= r.q3 <= r.max
