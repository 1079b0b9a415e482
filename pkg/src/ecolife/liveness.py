"""Availability classification for APIs and mashups.

An API is dead when its description says so, when it sits in the deathpool,
or when its endpoint is unreachable or answers 404. Dead APIs with a single
known successor were *transferred*, with several they were *split*.

A mashup is *unreachable* when its homepage cannot be fetched (or it has
none) and *replaced* when the page loads but no longer mentions the mashup.

Probing goes through a "probe source": :class:`LiveProber` does real HTTP,
:class:`FixtureProber` replays canned responses from a :class:`FixtureStore`
so classification runs bit-exact offline.
"""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping
from urllib.parse import urlsplit

from .dataset import ApiRecord, Dataset, MashupRecord

log = logging.getLogger(__name__)

OK = "ok"
NOT_FOUND = "not_found_404"
UNREACHABLE = "unreachable"
OTHER_STATUS = "other_status"

# higher is "more available"
_OUTCOME_RANK = {UNREACHABLE: 0, NOT_FOUND: 1, OTHER_STATUS: 2, OK: 3}
OBSOLETE_OUTCOMES = frozenset({NOT_FOUND, UNREACHABLE})

API_VERDICTS = ("available", "dead", "transfer", "split")
MASHUP_VERDICTS = ("available", "unreachable", "replaced")

DEFAULT_PHRASES = (
    "no longer available",
    "no longer exists",
    "has been discontinued",
    "deprecated",
)
PHRASES_VERSION = "1"

SUCCESSOR_TABLE = Path(__file__).with_name("data") / "successors.json"


class ProbeError(Exception):
    pass


class InvalidURL(ProbeError, ValueError):
    pass


class MissingFixture(ProbeError, KeyError):
    def __str__(self):
        return f"no fixture for URL {self.args[0]!r}"


@dataclass(frozen=True)
class ProbePolicy:
    timeout: float = 10.0
    retries: int = 3
    retry_gap: float = 1.0
    rate_limit: float = 1.0  # seconds between requests to one host


@dataclass(frozen=True)
class ProbeResult:
    url: str
    outcome: str
    status_code: int | None = None
    fetched_body_excerpt: str | None = None
    probe_time: str | None = None
    attempt: int = 1

    def __post_init__(self):
        if self.outcome == NOT_FOUND and self.status_code != 404:
            raise ValueError("not_found_404 requires status code 404")
        if self.outcome == UNREACHABLE and self.status_code is not None:
            raise ValueError("unreachable means no HTTP response")

    @property
    def rank(self) -> int:
        return _OUTCOME_RANK[self.outcome]

    @property
    def obsolete(self) -> bool:
        return self.outcome in OBSOLETE_OUTCOMES

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "outcome": self.outcome,
            "status_code": self.status_code,
            "attempt": self.attempt,
        }


@dataclass(frozen=True)
class LivenessVerdict:
    entity_id: str
    kind: str
    verdict: str
    evidence: tuple = ()
    successor_ids: tuple[str, ...] = ()

    def __post_init__(self):
        allowed = API_VERDICTS if self.kind == "api" else MASHUP_VERDICTS
        if self.verdict not in allowed:
            raise ValueError(f"{self.kind} verdict cannot be {self.verdict!r}")
        n = len(self.successor_ids)
        if self.verdict == "transfer" and n != 1:
            raise ValueError("transfer needs exactly one successor")
        if self.verdict == "split" and n < 2:
            raise ValueError("split needs at least two successors")
        if self.verdict not in ("transfer", "split") and n:
            raise ValueError("only transfer/split verdicts carry successors")

    @property
    def available(self) -> bool:
        return self.verdict == "available"

    def evidence_summary(self) -> list[str]:
        out = []
        for e in self.evidence:
            if isinstance(e, ProbeResult):
                code = "" if e.status_code is None else f" {e.status_code}"
                out.append(f"probe:{e.outcome}{code}")
            else:
                out.append(str(e))
        return out

    def to_dict(self) -> dict:
        return {
            "id": self.entity_id,
            "kind": self.kind,
            "verdict": self.verdict,
            "successors": list(self.successor_ids),
            "evidence_summary": self.evidence_summary(),
        }


def outcome_for_status(status: int | None) -> str:
    if status is None:
        return UNREACHABLE
    if status == 404:
        return NOT_FOUND
    if 200 <= status < 400:
        return OK
    return OTHER_STATUS


def check_url(url: str) -> str:
    parts = urlsplit(url or "")
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise InvalidURL(f"not an http(s) URL: {url!r}")
    return url


def url_key(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()[:32]


def best_of(results: Iterable[ProbeResult]) -> ProbeResult:
    """Most-available result; earliest attempt wins ties."""
    results = list(results)
    if not results:
        raise ValueError("no probe results")
    return max(results, key=lambda r: (r.rank, -r.attempt))


# ------------------------------------------------------------ transports

Fetch = Callable[[str, float], "tuple[int | None, str | None]"]


def http_fetch(url: str, timeout: float) -> tuple[int | None, str | None]:
    """GET ``url``; network failures return ``(None, None)``."""
    import requests

    try:
        resp = requests.get(
            url, timeout=timeout, allow_redirects=True,
            headers={"User-Agent": "ecolife-liveness/0.1"},
        )
    except requests.RequestException:
        return None, None
    return resp.status_code, resp.text


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def probe(
    url: str,
    policy: ProbePolicy = ProbePolicy(),
    fetch: Fetch = http_fetch,
    sleep: Callable[[float], None] = time.sleep,
    clock: Callable[[], str] = _now,
) -> ProbeResult:
    """Probe ``url`` up to ``policy.retries`` times and keep the best outcome.

    Stops early on the first ``ok``. Transport failures become
    ``unreachable``; only a malformed URL raises.
    """
    check_url(url)
    results = []
    for attempt in range(1, max(1, policy.retries) + 1):
        if attempt > 1 and policy.retry_gap > 0:
            sleep(policy.retry_gap)
        try:
            status, body = fetch(url, policy.timeout)
        except Exception as exc:  # noqa: BLE001 - any transport failure
            log.debug("probe %s failed: %s", url, exc)
            status, body = None, None
        outcome = outcome_for_status(status)
        results.append(ProbeResult(
            url, outcome, status,
            None if body is None else body[:2000],
            clock(), attempt,
        ))
        if outcome == OK:
            break
    return best_of(results)


class FixtureStore:
    """Directory of canned responses, one JSON file per URL.

    Each file is named ``<url_key(url)>.json`` and holds ``{"url": ...,
    "responses": [{"status_code": int|null, "body": str|null}, ...]}``.
    Successive fetches of one URL walk the response list and then stay on its
    last entry. A single ``{"status_code", "body"}`` pair is also accepted.
    """

    def __init__(self, path):
        self.path = Path(path)
        if not self.path.is_dir():
            raise FileNotFoundError(self.path)
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()

    def _load(self, url: str) -> list[dict]:
        f = self.path / f"{url_key(url)}.json"
        if not f.exists():
            raise MissingFixture(url)
        data = json.loads(f.read_text(encoding="utf-8"))
        responses = data.get("responses")
        if responses is None:
            responses = [{"status_code": data.get("status_code"), "body": data.get("body")}]
        return responses

    def __contains__(self, url: str) -> bool:
        return (self.path / f"{url_key(url)}.json").exists()

    def fetch(self, url: str, timeout: float = 0.0):
        responses = self._load(url)
        with self._lock:
            i = self._cursor.get(url, 0)
            self._cursor[url] = i + 1
        r = responses[min(i, len(responses) - 1)]
        return r.get("status_code"), r.get("body")

    def reset(self):
        with self._lock:
            self._cursor.clear()

    @staticmethod
    def write(path, url: str, responses: list[dict]) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        f = path / f"{url_key(url)}.json"
        f.write_text(json.dumps({"url": url, "responses": responses}, sort_keys=True) + "\n",
                     encoding="utf-8")
        return f


class FixtureProber:
    """Deterministic prober over a :class:`FixtureStore`.

    Each :meth:`probe` call replays the URL's response list from the start,
    so results never depend on call order.
    """

    def __init__(self, store: FixtureStore, policy: ProbePolicy = ProbePolicy(retry_gap=0)):
        self.store = store
        self.policy = policy

    def probe(self, url: str) -> ProbeResult:
        check_url(url)
        responses = self.store._load(url)
        cursor = iter(range(len(responses)))

        def fetch(u, timeout):
            i = next(cursor, len(responses) - 1)
            r = responses[i]
            return r.get("status_code"), r.get("body")

        return probe(url, self.policy, fetch, sleep=lambda s: None, clock=lambda: None)

    def probe_many(self, urls: Iterable[str], workers: int = 1) -> dict[str, ProbeResult]:
        return {u: self.probe(u) for u in sorted(set(urls))}


class LiveProber:
    """HTTP prober: hosts are probed concurrently, each host serially.

    Requests to one host are spaced by ``policy.rate_limit`` seconds.
    """

    def __init__(self, policy: ProbePolicy = ProbePolicy(), fetch: Fetch = http_fetch):
        self.policy = policy
        self.fetch = fetch

    def probe(self, url: str) -> ProbeResult:
        try:
            return probe(url, self.policy, self.fetch)
        except InvalidURL:
            return ProbeResult(url, UNREACHABLE, probe_time=_now())

    def _probe_host(self, urls: list[str]) -> list[ProbeResult]:
        out = []
        for n, url in enumerate(urls):
            if n and self.policy.rate_limit > 0:
                time.sleep(self.policy.rate_limit)
            out.append(self.probe(url))
        return out

    def probe_many(self, urls: Iterable[str], workers: int = 8) -> dict[str, ProbeResult]:
        by_host: dict[str, list[str]] = {}
        for u in sorted(set(urls)):
            by_host.setdefault(urlsplit(u).netloc.lower(), []).append(u)
        results: dict[str, ProbeResult] = {}
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            for batch in pool.map(self._probe_host, by_host.values()):
                for r in batch:
                    results[r.url] = r
        return results


# -------------------------------------------------------- classification

def load_successor_table(path=SUCCESSOR_TABLE) -> dict[str, tuple[str, ...]]:
    """Curated ``api_id -> successor ids`` table (JSON object)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    table = data.get("successors", data)
    return {k: tuple(v) for k, v in table.items()}


def classify_api_text(description: str, phrases: Iterable[str] = DEFAULT_PHRASES) -> str | None:
    text = (description or "").lower()
    for phrase in phrases:
        if phrase.lower() in text:
            return "dead"
    return None


def _text_hit(description, phrases):
    text = (description or "").lower()
    return next((p for p in phrases if p.lower() in text), None)


def classify_api(
    record: ApiRecord,
    probe_result: ProbeResult | None = None,
    successor_table: Mapping[str, Iterable[str]] | None = None,
    phrases: Iterable[str] = DEFAULT_PHRASES,
) -> LivenessVerdict:
    successors = tuple(dict.fromkeys(
        list(record.successor_ids) + list((successor_table or {}).get(record.id, ()))
    ))
    evidence: list = []
    hit = _text_hit(record.description, phrases)
    if hit is not None:
        evidence.append(f"text:{hit}")
    elif record.labeled_status == "deprecated" or record.deathpool_date is not None:
        evidence.append("label:deathpool")
    elif probe_result is not None:
        evidence.append(probe_result)
        if not probe_result.obsolete:
            return LivenessVerdict(record.id, "api", "available", tuple(evidence))
    elif record.endpoint_url:
        raise ValueError(f"{record.id}: endpoint present but no probe result")
    else:
        evidence.append("no endpoint")

    if len(successors) == 1:
        verdict = "transfer"
    elif len(successors) >= 2:
        verdict = "split"
    else:
        verdict, successors = "dead", ()
    return LivenessVerdict(record.id, "api", verdict, tuple(evidence), successors)


_TOKEN = re.compile(r"[^\w]+", re.UNICODE)


def name_tokens(name: str, min_len: int = 4) -> list[str]:
    return [t for t in _TOKEN.split((name or "").lower()) if len(t) >= min_len]


def mentions(html: str | None, name: str, min_len: int = 4) -> bool:
    """True if any name token of ``min_len``+ characters appears in ``html``."""
    if not html:
        return False
    text = " ".join(_TOKEN.split(html.lower()))
    words = set(text.split())
    tokens = name_tokens(name, min_len)
    if not tokens:
        # too short to match conservatively: fall back to the whole name
        squashed = "".join(_TOKEN.split((name or "").lower()))
        return bool(squashed) and squashed in words
    return any(t in words for t in tokens)


def classify_mashup(
    record: MashupRecord,
    homepage_probe: ProbeResult | None,
    homepage_html: str | None = None,
) -> LivenessVerdict:
    if record.labeled_status == "deprecated" or record.deathpool_date is not None:
        return LivenessVerdict(record.id, "mashup", "unreachable", ("label:deathpool",))
    if not record.homepage_url or homepage_probe is None:
        return LivenessVerdict(record.id, "mashup", "unreachable", ("no homepage",))
    if homepage_probe.obsolete:
        return LivenessVerdict(record.id, "mashup", "unreachable", (homepage_probe,))
    html = homepage_html if homepage_html is not None else homepage_probe.fetched_body_excerpt
    if not mentions(html, record.name):
        # token rule is a stand-in for manual coding
        return LivenessVerdict(
            record.id, "mashup", "replaced", (homepage_probe, "rule:name-token-absent"))
    return LivenessVerdict(record.id, "mashup", "available", (homepage_probe,))


def _urls(ds: Dataset, phrases) -> list[str]:
    urls = []
    for a in ds.apis.values():
        if (a.endpoint_url and a.labeled_status != "deprecated" and a.deathpool_date is None
                and _text_hit(a.description, phrases) is None):
            urls.append(a.endpoint_url)
    for m in ds.mashups.values():
        if m.homepage_url and m.labeled_status != "deprecated" and m.deathpool_date is None:
            urls.append(m.homepage_url)
    return urls


def classify_all(
    ds: Dataset,
    probe_source,
    successor_table: Mapping[str, Iterable[str]] | None = None,
    phrases: Iterable[str] = DEFAULT_PHRASES,
    repeat: int = 1,
    workers: int = 1,
) -> dict[str, LivenessVerdict]:
    """Verdicts for every record in ``ds``.

    ``probe_source`` is a :class:`FixtureProber` or :class:`LiveProber`
    (anything with ``probe_many(urls, workers)``). With ``repeat > 1`` the
    passes are merged per URL with best-of semantics.
    """
    phrases = tuple(phrases)
    urls = _urls(ds, phrases)
    passes = [probe_source.probe_many(urls, workers=workers) for _ in range(max(1, repeat))]
    probes = {u: best_of(p[u] for p in passes) for u in passes[0]}

    out: dict[str, LivenessVerdict] = {}
    for a in ds.apis.values():
        pr = probes.get(a.endpoint_url) if a.endpoint_url else None
        if a.endpoint_url and pr is None:
            pr = ProbeResult(a.endpoint_url, UNREACHABLE)
        out[a.id] = classify_api(a, pr, successor_table, phrases)
    for m in ds.mashups.values():
        pr = probes.get(m.homepage_url) if m.homepage_url else None
        out[m.id] = classify_mashup(m, pr)
    return out


def verdict_counts(verdicts: Mapping[str, LivenessVerdict]) -> dict[tuple[str, str], int]:
    counts: dict[tuple[str, str], int] = {}
    for v in verdicts.values():
        counts[(v.kind, v.verdict)] = counts.get((v.kind, v.verdict), 0) + 1
    return counts


def write_verdicts(verdicts: Mapping[str, LivenessVerdict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(verdicts):
            fh.write(json.dumps(verdicts[key].to_dict(), sort_keys=True) + "\n")


def read_verdicts(path) -> dict[str, LivenessVerdict]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            out[d["id"]] = LivenessVerdict(
                d["id"], d["kind"], d["verdict"],
                tuple(d.get("evidence_summary", ())), tuple(d.get("successors", ())),
            )
    return out
