"""Synthetic ecosystems with known ground truth.

:func:`make_ecosystem` simulates a service ecosystem the way the crawl sees
it: entities have true lifetimes, but only some dead ones are labeled (a
trustworthy recent deathpool, an untrustworthy April-2014 batch, a couple of
entries deprecated before they were even submitted), and the rest look
available until probed. Probe responses are emitted as a fixture store so the
whole pipeline can run offline.

:func:`mosoto_fixture` is the small Box/Facebook example used to check
composition repair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correction import NormalFit
from .dataset import ApiRecord, Dataset, MashupRecord, from_records, write_json_lines
from .dates import iso, to_day, year_of
from .liveness import FixtureStore, LivenessVerdict

BUNDLED = Path(__file__).with_name("data") / "ecosystem"

CATEGORIES = (
    "Mapping", "Social", "eCommerce", "Search", "Photos", "Video", "Messaging",
    "Financial", "Weather", "Music", "Travel", "Reference", "Tools", "Enterprise",
    "Science", "Sports", "News", "Advertising", "Email", "Telephony", "Education",
    "Government", "Games", "Health", "Storage",
)
_CAT_WEIGHTS = np.array([12, 11, 9, 7, 6, 6, 5, 5, 3, 4, 4, 4, 6, 5, 2, 2, 3, 3, 2, 3, 2, 2, 2, 1, 2],
                        dtype=float)

# (id, name, category, start, popularity)
NAMED_APIS = (
    ("/api/google-maps", "Google Maps", "Mapping", "2005-12-05", 40.0),
    ("/api/twitter", "Twitter", "Social", "2006-12-01", 30.0),
    ("/api/youtube", "YouTube", "Video", "2006-02-08", 22.0),
    ("/api/flickr", "Flickr", "Photos", "2005-09-01", 22.0),
    ("/api/facebook", "Facebook", "Social", "2006-09-01", 25.0),
    ("/api/box", "Box", "Storage", "2008-03-01", 4.0),
    ("/api/zillow", "Zillow", "Financial", "2006-03-01", 3.0),
    ("/api/google-visualization", "Google Visualization", "Tools", "2008-06-01", 2.0),
    ("/api/google-geocoding", "Google Geocoding", "Mapping", "2008-01-15", 5.0),
    ("/api/instagram-graph", "Instagram Graph", "Photos", "2016-03-01", 6.0),
)
FACEBOOK_SPLIT = (
    ("/api/facebook-ads", "Facebook Ads", "Advertising", "2013-03-01"),
    ("/api/facebook-atlas", "Facebook Atlas", "Advertising", "2014-05-01"),
    ("/api/facebook-graph", "Facebook Graph", "Social", "2014-11-01"),
    ("/api/facebook-marketing", "Facebook Marketing", "Advertising", "2015-06-01"),
)
FACEBOOK_SUCCESSOR_DEATH = "2018-06-30"

_WORDS = (
    "atlas", "beacon", "cinder", "delta", "ember", "fable", "garnet", "harbor", "indigo",
    "jasper", "kettle", "lumen", "meadow", "nimbus", "orbit", "pixel", "quartz", "raven",
    "summit", "tundra", "umbra", "vertex", "willow", "xenon", "yonder", "zephyr", "trail",
    "spark", "pulse", "glide", "cloud", "stream", "radar", "nexus", "scope", "vista",
)
PARKED_PAGE = ("<html><head><title>Welcome</title></head><body><h1>This page is parked"
               "</h1><p>Buy this site today. Inquire for pricing.</p></body></html>")

T0 = to_day("2005-09-01")
API_T1 = to_day("2020-06-30")
BETA = to_day("2020-09-10")
TRUST_LO, TRUST_HI = to_day("2018-01-01"), to_day("2020-12-31")
CLUSTER_LO, CLUSTER_HI = to_day("2014-04-01"), to_day("2014-04-30")


@dataclass
class Ecosystem:
    dataset: Dataset
    probes: dict[str, list[dict]]
    truth: dict[str, dict]
    reference_sample: list[int]
    params: dict = field(default_factory=dict)

    def expected_verdicts(self) -> dict[str, str]:
        return {k: v["verdict"] for k, v in self.truth.items()}

    def write(self, directory) -> Path:
        """Write ``dataset.jsonl``, ``probes/``, ``reference_longevity.json``, ``truth.json``."""
        directory = Path(directory)
        (directory / "probes").mkdir(parents=True, exist_ok=True)
        write_json_lines(self.dataset, directory / "dataset.jsonl")
        for url in sorted(self.probes):
            FixtureStore.write(directory / "probes", url, self.probes[url])
        (directory / "reference_longevity.json").write_text(
            json.dumps({"longevity_days": self.reference_sample}, indent=0) + "\n",
            encoding="utf-8")
        (directory / "truth.json").write_text(
            json.dumps({"params": self.params, "entities": self.truth}, sort_keys=True,
                       indent=1) + "\n", encoding="utf-8")
        return directory


def _truncnorm(rng, mu, sigma, lo, size=None):
    out = rng.normal(mu, sigma, size)
    bad = out < lo
    while np.any(bad):
        out[bad] = rng.normal(mu, sigma, int(bad.sum()))
        bad = out < lo
    return np.rint(out).astype(int)


def _mashup_name(rng, used):
    while True:
        name = " ".join(w.capitalize() for w in rng.choice(_WORDS, 2, replace=False))
        if name not in used:
            used.add(name)
            return name


def make_ecosystem(
    seed: int = 2020,
    n_apis: int = 640,
    n_mashups: int = 380,
    longevity_mu: float = 1400.0,
    longevity_sigma: float = 600.0,
    immortal_api: float = 0.26,
    immortal_mashup: float = 0.12,
) -> Ecosystem:
    """Simulate an ecosystem of about ``n_apis + n_mashups`` entities."""
    rng = np.random.default_rng(seed)
    truth: dict[str, dict] = {}
    probes: dict[str, list[dict]] = {}
    records = []

    # ---------------------------------------------------------------- APIs
    apis = []  # dicts: id, name, cat, start, death, pop, successors
    for aid, name, cat, start, pop in NAMED_APIS:
        apis.append(dict(id=aid, name=name, cat=cat, start=to_day(start), pop=pop,
                         death=None, successors=()))
    fb = next(a for a in apis if a["id"] == "/api/facebook")
    fb_succ = []
    for aid, name, cat, start in FACEBOOK_SPLIT:
        d = to_day(FACEBOOK_SUCCESSOR_DEATH) if aid in ("/api/facebook-ads",
                                                       "/api/facebook-atlas") else None
        apis.append(dict(id=aid, name=name, cat=cat, start=to_day(start), pop=6.0,
                         death=d, successors=(), trusted=d is not None))
        fb_succ.append(aid)
    fb["death"] = max(to_day(s[3]) for s in FACEBOOK_SPLIT)
    fb["successors"] = tuple(fb_succ)
    fb["via_table"] = True

    n_generic = n_apis - len(apis)
    # submissions ramp up, plateau around 2010 and fade after 2014
    years = np.arange(2005, 2021)
    yw = np.array([1, 6, 8, 9, 10, 11, 11, 10, 9, 7, 5, 3, 2, 1.5, 1, 0.5])
    a_years = rng.choice(years, n_generic, p=yw / yw.sum())
    starts = np.sort(np.clip([to_day(f"{y}-01-01") + int(rng.integers(0, 365)) for y in a_years],
                             T0, API_T1))
    cats = rng.choice(len(CATEGORIES), n_generic, p=_CAT_WEIGHTS / _CAT_WEIGHTS.sum())
    pops = rng.pareto(1.3, n_generic) + 0.3
    longev = _truncnorm(rng, longevity_mu, longevity_sigma, 30, n_generic)
    immortal = rng.random(n_generic) < immortal_api
    for i in range(n_generic):
        s = int(starts[i])
        death = None if immortal[i] or s + longev[i] > BETA else s + int(longev[i])
        apis.append(dict(id=f"/api/service-{i:04d}", name=f"Service {i:04d}",
                         cat=CATEGORIES[cats[i]], start=s, pop=float(pops[i]),
                         death=death, successors=()))

    # transfers and one generic split, successors created at the predecessor's end
    generic = [a for a in apis if a["id"].startswith("/api/service-")]
    early = [a for a in generic if a["start"] < to_day("2012-01-01")]
    late_alive = [a for a in generic if a["death"] is None and a["start"] > to_day("2013-01-01")]
    picks = rng.choice(len(early), 3, replace=False)
    succ_pool = list(rng.choice(len(late_alive), 4, replace=False))
    for n, k in enumerate(picks):
        a = early[k]
        if n < 2:
            s = [late_alive[succ_pool.pop()]["id"]]
        else:
            s = [late_alive[succ_pool.pop()]["id"], late_alive[succ_pool.pop()]["id"]]
        a["successors"] = tuple(s)
        a["death"] = max(x["start"] for x in apis if x["id"] in s)
        if a["death"] <= a["start"]:
            a["death"] = None
            a["successors"] = ()

    # implausible deathpool entries: submitted after their "death"
    implausible = set()
    recent = [a for a in generic if a["start"] > to_day("2019-06-01") and not a["successors"]]
    if len(recent) < 2:
        recent = [a for a in generic if a["start"] > to_day("2016-01-01") and not a["successors"]]
    for a in rng.choice(recent, min(2, len(recent)), replace=False):
        implausible.add(a["id"])

    for a in apis:
        aid, death = a["id"], a["death"]
        url = f"https://{aid.split('/')[-1]}.example.org/v1"
        labeled, dp, desc = "available", None, f"{a['name']} provides {a['cat'].lower()} data."
        u = rng.random()
        if aid in implausible:
            labeled, dp = "deprecated", int(rng.integers(CLUSTER_LO, CLUSTER_HI + 1))
            verdict = "dead"
            responses = [{"status_code": 200, "body": "ok"}]
        elif death is None:
            verdict = "available"
            r = rng.random()
            if r < 0.08:
                responses = [{"status_code": None, "body": None}, {"status_code": 200, "body": "ok"}]
            elif r < 0.12:
                responses = [{"status_code": 404, "body": "nope"}, {"status_code": 200, "body": "ok"}]
            elif r < 0.16:
                responses = [{"status_code": 403, "body": "forbidden"}]
            else:
                responses = [{"status_code": 200, "body": "ok"}]
        else:
            verdict = ("transfer" if len(a["successors"]) == 1 else
                       "split" if a["successors"] else "dead")
            if a.get("trusted") or (TRUST_LO <= death and u < 0.4):
                labeled = "deprecated"
                dp = death if a.get("trusted") else int(min(death + rng.integers(-50, 51), TRUST_HI))
                dp = max(dp, TRUST_LO)
            elif death < CLUSTER_LO and u < 0.15:
                labeled, dp = "deprecated", int(rng.integers(CLUSTER_LO, CLUSTER_HI + 1))
            elif rng.random() < 0.08:
                desc = f"{a['name']} is no longer available."
            status = [404, None][int(rng.random() < 0.45)]
            responses = [{"status_code": status, "body": None if status is None else "not found"}]
        probes[url] = responses
        succ_field = () if a.get("via_table") else a["successors"]
        records.append(ApiRecord(
            id=aid, name=a["name"], start=a["start"], labeled_status=labeled,
            deathpool_date=dp, endpoint_url=url, primary_category=a["cat"],
            description=desc, successor_ids=succ_field))
        truth[aid] = {"kind": "api", "verdict": verdict, "true_end": iso(death),
                      "successors": list(a["successors"])}

    # ------------------------------------------------------------- mashups
    year_w = {2005: 1, 2006: 5, 2007: 9, 2008: 11, 2009: 12, 2010: 12, 2011: 11,
              2012: 10, 2013: 9, 2014: 5, 2015: 3, 2016: 2.5, 2017: 2, 2018: 1.5,
              2019: 1, 2020: 0.5}
    years = np.array(list(year_w))
    yw = np.array(list(year_w.values()), dtype=float)
    m_years = rng.choice(years, n_mashups, p=yw / yw.sum())
    m_starts = np.sort([max(T0 + 30, to_day(f"{y}-01-01") + int(rng.integers(0, 365)))
                        for y in m_years])
    m_starts = np.minimum(m_starts, BETA - 60)
    size_p = np.array([0.50, 0.26, 0.12, 0.06, 0.03, 0.02, 0.01])
    m_longev = _truncnorm(rng, longevity_mu, longevity_sigma, 30, n_mashups)
    m_immortal = rng.random(n_mashups) < immortal_mashup
    used_names: set[str] = set()
    api_by_id = {a["id"]: a for a in apis}
    big_done = False

    def alive_apis(t):
        return [a for a in apis if a["start"] <= t and (a["death"] is None or a["death"] > t)]

    specials = [("/mashup/mosoto", "Mosoto", "Storage", to_day("2011-05-10"),
                 ("/api/box", "/api/facebook"))]
    for i in range(n_mashups):
        t = int(m_starts[i])
        pool = alive_apis(t)
        if year_of(t) == 2012 and not big_done:
            k = min(36, len(pool))
            big_done = True
        else:
            k = int(rng.choice(np.arange(1, 8), p=size_p / size_p.sum()))
            k = min(k, len(pool))
        w = np.array([a["pop"] for a in pool])
        chosen = rng.choice(len(pool), k, replace=False, p=w / w.sum())
        comp = tuple(pool[j]["id"] for j in sorted(chosen))
        cat = pool[int(chosen[0])]["cat"]
        death = None if m_immortal[i] or t + m_longev[i] > BETA else t + int(m_longev[i])
        specials.append((f"/mashup/m{i:04d}", _mashup_name(rng, used_names), cat, t, comp,
                         death))

    for entry in specials:
        if len(entry) == 5:
            mid, name, cat, t, comp = entry
            death = None
        else:
            mid, name, cat, t, comp, death = entry
        url = f"https://{mid.split('/')[-1]}.example.net/"
        labeled, dp = "available", None
        if death is None:
            verdict = "available"
            body = f"<html><title>{name}</title><body>Welcome to {name}!</body></html>"
            responses = [{"status_code": 200, "body": body}]
            if rng.random() < 0.08:
                responses.insert(0, {"status_code": 503, "body": "busy"})
        else:
            u = rng.random()
            if TRUST_LO <= death and u < 0.35:
                labeled = "deprecated"
                dp = int(min(max(death + rng.integers(-50, 51), TRUST_LO), TRUST_HI))
                verdict = "unreachable"
                responses = None
            elif death < CLUSTER_LO and u < 0.12:
                labeled, dp = "deprecated", int(rng.integers(CLUSTER_LO, CLUSTER_HI + 1))
                verdict = "unreachable"
                responses = None
            elif rng.random() < 0.4:
                verdict = "replaced"
                responses = [{"status_code": 200, "body": PARKED_PAGE}]
            else:
                verdict = "unreachable"
                status = [404, None][int(rng.random() < 0.5)]
                responses = [{"status_code": status, "body": None if status is None else "gone"}]
        if responses is not None:
            probes[url] = responses
        records.append(MashupRecord(
            id=mid, name=name, start=t, labeled_status=labeled, deathpool_date=dp,
            homepage_url=url, primary_category=cat, api_ids=comp,
            description=f"{name} combines " + ", ".join(api_by_id[a]["name"] for a in comp)))
        truth[mid] = {"kind": "mashup", "verdict": verdict, "true_end": iso(death)}

    # manually checked reference sample: true longevities of dead entities
    dead = [(to_day(v["true_end"]) - r.start) for r in records
            for v in [truth[r.id]] if v["true_end"] is not None and not truth[r.id].get("successors")]
    ref_idx = rng.choice(len(dead), min(200, len(dead)), replace=False)
    reference = sorted(int(dead[j]) for j in ref_idx)

    ds = from_records(records, source=f"synthetic(seed={seed})")
    params = dict(seed=seed, n_apis=n_apis, n_mashups=n_mashups, longevity_mu=longevity_mu,
                  longevity_sigma=longevity_sigma, immortal_api=immortal_api,
                  immortal_mashup=immortal_mashup)
    return Ecosystem(ds, probes, truth, reference, params)


def load_bundled(directory=BUNDLED):
    """``(dataset_path, probe_store_path, reference_sample)`` of a written fixture."""
    directory = Path(directory)
    ref = json.loads((directory / "reference_longevity.json").read_text())["longevity_days"]
    return directory / "dataset.jsonl", directory / "probes", ref


# ----------------------------------------------------------------- Mosoto

MOSOTO_SPLIT_DAY = to_day("2015-06-01")
MOSOTO_DEATH_DAY = to_day("2018-06-30")


def mosoto_fixture():
    """Box + Facebook mashup, Facebook split into four, two successors retired together.

    Returns ``(dataset, verdicts, fit)`` ready for ``apply_corrections``.
    """
    recs = [
        ApiRecord("/api/box", "Box", to_day("2008-03-01"), primary_category="Storage",
                  endpoint_url="https://box.example.org/"),
        ApiRecord("/api/facebook", "Facebook", to_day("2006-09-01"), primary_category="Social",
                  endpoint_url="https://facebook.example.org/"),
    ]
    for aid, name, cat, start in FACEBOOK_SPLIT:
        dead = aid in ("/api/facebook-ads", "/api/facebook-atlas")
        recs.append(ApiRecord(
            aid, name, to_day(start), "deprecated" if dead else "available",
            MOSOTO_DEATH_DAY if dead else None, f"https://{aid[5:]}.example.org/", cat))
    recs.append(MashupRecord("/mashup/mosoto", "Mosoto", to_day("2011-05-10"),
                             homepage_url="https://mosoto.example.net/",
                             primary_category="Storage",
                             api_ids=("/api/box", "/api/facebook")))
    ds = from_records(recs, "mosoto")
    verdicts = {
        "/api/box": LivenessVerdict("/api/box", "api", "available"),
        "/api/facebook": LivenessVerdict("/api/facebook", "api", "split", ("probe:unreachable",),
                                         tuple(s[0] for s in FACEBOOK_SPLIT)),
        "/api/facebook-ads": LivenessVerdict("/api/facebook-ads", "api", "dead"),
        "/api/facebook-atlas": LivenessVerdict("/api/facebook-atlas", "api", "dead"),
        "/api/facebook-graph": LivenessVerdict("/api/facebook-graph", "api", "available"),
        "/api/facebook-marketing": LivenessVerdict("/api/facebook-marketing", "api", "available"),
        "/mashup/mosoto": LivenessVerdict("/mashup/mosoto", "mashup", "available"),
    }
    return ds, verdicts, NormalFit(900.0, 300.0 ** 2, 200)


# ------------------------------------------------------------ pair survival

def pair_survival_fixture(pairs, seed: int = 0, reference=BETA):
    """Corrected dataset in which each ``(api_a, api_b, total, active)`` pair is
    used by ``total`` two-API mashups, ``active`` of them alive at ``reference``.

    Pairs must not share APIs, otherwise mashups of one pair would not
    contribute to another.
    """
    from .correction import ALIVE, OBSERVED, CompositionTimeline, CorrectedDataset, \
        LifecycleEstimate

    rng = np.random.default_rng(seed)
    ref = to_day(reference)
    lo = to_day("2008-01-01")
    recs, lcs, tls = [], {}, {}
    for a, b, total, active in pairs:
        if not 0 <= active <= total:
            raise ValueError(f"{a}/{b}: active must lie in [0, total]")
        for api in (a, b):
            recs.append(ApiRecord(api, api.rsplit("/", 1)[-1], lo - 365,
                                  primary_category="Tools"))
            lcs[api] = LifecycleEstimate(api, lo - 365, None, ALIVE, ref)
        for i in range(total):
            mid = f"/mashup/{a.rsplit('/', 1)[-1]}-{b.rsplit('/', 1)[-1]}-{i}"
            start = int(rng.integers(lo, ref - 30))
            end = None if i < active else int(rng.integers(start + 1, ref + 1))
            recs.append(MashupRecord(mid, mid, start, api_ids=(a, b)))
            lcs[mid] = LifecycleEstimate(mid, start, end, ALIVE if end is None else OBSERVED,
                                         ref)
            tls[mid] = CompositionTimeline.initial(mid, (a, b), start, end)
    return CorrectedDataset(from_records(recs, "pair-survival"), lcs, tls,
                            meta={"beta": iso(ref), "seed": seed})


def survival_curve_fixture(seed: int = 0):
    """Many pairs whose survival chance rises with use, peaks near 50 uses and falls off.

    Rates follow ``0.25 + 0.5 * exp(-((f - 50) / 18)**2)`` for a pair used
    ``f`` times; the active count is binomial.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for i, f in enumerate(range(2, 122, 2)):
        for j in range(3):
            rate = 0.25 + 0.5 * np.exp(-(((f - 50) / 18.0) ** 2))
            k = f"{i:03d}{j}"
            pairs.append((f"/api/p{k}a", f"/api/p{k}b", f, int(rng.binomial(f, rate))))
    return pair_survival_fixture(pairs, seed)
