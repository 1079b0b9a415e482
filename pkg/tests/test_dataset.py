import json

import pytest
from hypothesis import given, settings, strategies as st

from ecolife.dataset import (
    ApiRecord, DuplicateIdError, MashupRecord, SchemaError, deathpool_window, from_records,
    parse_dataset, serialize, validate, write_csv_pair, write_json_lines,
)
from ecolife.dates import iso, to_day


def _rows():
    return [
        {"id": "/api/maps", "name": "Maps", "start": "2008-01-01", "labeled_status": "available",
         "endpoint_url": "https://maps.example.org/", "primary_category": "Mapping",
         "description": "Tiles."},
        {"id": "/api/chat", "name": "Chat", "start": "2009-05-05", "labeled_status": "deprecated",
         "deathpool_date": "2019-02-01", "primary_category": "Messaging", "description": ""},
        {"id": "/api/old", "name": "Old", "start": "2006-01-01", "labeled_status": "available",
         "primary_category": "Tools", "description": "", "successor_ids": ["/api/maps"]},
        {"kind": "mashup", "id": "/mashup/a", "name": "Alpha Map", "start": "2010-01-01",
         "labeled_status": "available", "homepage_url": "https://a.example.net/",
         "primary_category": "Mapping", "api_ids": ["/api/maps", "/api/chat"],
         "description": ""},
        {"id": "/mashup/b", "name": "Beta", "start": "2011-01-01", "labeled_status": "available",
         "primary_category": "Tools", "api_ids": ["/api/old"], "description": ""},
    ]


def _write(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


@pytest.fixture
def small(tmp_path):
    return _write(tmp_path / "small.jsonl", _rows())


def test_counts(small):
    ds = parse_dataset(small)
    assert ds.counts == (3, 2)
    assert ds.metadata["n_apis"] == 3
    assert ds.mashups["/mashup/b"].api_ids == ("/api/old",)
    assert ds.apis["/api/chat"].deathpool_date == to_day("2019-02-01")


def test_clean_fixture_has_empty_report(small):
    report = validate(parse_dataset(small))
    assert not report
    assert report.counts == {}


def test_implausible_death_flag(tmp_path):
    rows = _rows() + [{"id": "/api/iron", "name": "Iron Mountain Policy Center",
                       "start": "2020-01-21", "labeled_status": "deprecated",
                       "deathpool_date": "2014-04-01", "primary_category": "Enterprise"}]
    ds = parse_dataset(_write(tmp_path / "x.jsonl", rows))
    assert "implausible_death" in ds.flags("/api/iron")
    assert validate(ds).counts == {"implausible_death": 1}


def test_dangling_reference(tmp_path):
    rows = _rows()
    rows[3]["api_ids"].append("/api/ghost")
    rows[4]["api_ids"] = ["/api/ghost2"]
    ds = parse_dataset(_write(tmp_path / "x.jsonl", rows))
    assert ds.counts == (3, 2)
    report = validate(ds)
    assert report.counts == {"dangling_reference": 2}
    assert report.ids["dangling_reference"] == ("/mashup/a", "/mashup/b")


def test_other_flags(tmp_path):
    rows = _rows()
    rows[4]["api_ids"] = []
    rows[0]["primary_category"] = ""
    ds = parse_dataset(_write(tmp_path / "x.jsonl", rows))
    assert validate(ds).counts == {"empty_composition": 1, "missing_category": 1}


def test_validate_is_pure_and_idempotent(small):
    ds = parse_dataset(small)
    before = dict(ds.apis)
    a, b = validate(ds), validate(ds)
    assert a == b and a.to_json() == b.to_json()
    assert dict(ds.apis) == before


def test_report_json_shape(tmp_path):
    rows = _rows()
    rows[4]["api_ids"] = ["/api/ghost"]
    d = json.loads(validate(parse_dataset(_write(tmp_path / "x.jsonl", rows))).to_json())
    assert d["counts"] == {"dangling_reference": 1}
    assert d["ids"] == {"dangling_reference": ["/mashup/b"]}


def test_duplicate_id_reports_both_rows(tmp_path):
    rows = _rows() + [dict(_rows()[0], name="Maps again")]
    with pytest.raises(DuplicateIdError) as info:
        parse_dataset(_write(tmp_path / "x.jsonl", rows))
    first, second = info.value.rows
    assert first[0] == 1 and second[0] == 6
    assert "Maps again" in second[1] and "Maps again" not in first[1]
    assert "/api/maps" in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_dataset(tmp_path / "nope.jsonl")


def test_malformed_rows_are_reported_not_dropped(tmp_path):
    p = tmp_path / "x.jsonl"
    lines = [json.dumps(r) for r in _rows()]
    lines.insert(1, "{not json")
    lines.append(json.dumps({"id": "/api/bad", "name": "Bad", "start": "2010-13-45",
                             "labeled_status": "available", "primary_category": "X"}))
    lines.append(json.dumps({"id": "/api/worse", "name": "Worse", "start": "2010-01-01",
                             "labeled_status": "gone", "primary_category": "X"}))
    p.write_text("\n".join(lines) + "\n")
    ds = parse_dataset(p)
    assert ds.counts == (3, 2)
    assert [e.line for e in ds.errors] == [2, 7, 8]
    assert len(validate(ds).row_errors) == 3


def test_schema_mismatch(tmp_path):
    p = tmp_path / "x.jsonl"
    p.write_text("[1, 2]\n\"text\"\n")
    with pytest.raises(SchemaError):
        parse_dataset(p)
    (tmp_path / "apis.csv").write_text("a,b\n1,2\n")
    (tmp_path / "mashups.csv").write_text("a,b\n1,2\n")
    with pytest.raises(SchemaError):
        parse_dataset(tmp_path, "csv_pair")


def test_json_round_trip(small, tmp_path):
    ds = parse_dataset(small)
    out = tmp_path / "again.jsonl"
    serialize(ds, out)
    again = parse_dataset(out)
    assert dict(again.apis) == dict(ds.apis)
    assert dict(again.mashups) == dict(ds.mashups)


def test_csv_round_trip(small, tmp_path):
    ds = parse_dataset(small)
    write_csv_pair(ds, tmp_path / "csv")
    again = parse_dataset(tmp_path / "csv", "csv_pair")
    assert dict(again.apis) == dict(ds.apis)
    assert dict(again.mashups) == dict(ds.mashups)
    header = (tmp_path / "csv" / "mashups.csv").read_text().splitlines()[0]
    assert header.split(",")[-2:] == ["api_ids", "description"]
    assert "/api/maps;/api/chat" in (tmp_path / "csv" / "mashups.csv").read_text()


def test_deathpool_window_examples():
    recs = [
        ApiRecord("/api/x", "X", to_day("2018-01-01"), "deprecated", to_day("2018-12-31")),
        ApiRecord("/api/y", "Y", to_day("2010-01-01"), "deprecated", to_day("2014-04-01")),
        ApiRecord("/api/z", "Z", to_day("2020-01-21"), "deprecated", to_day("2019-04-01")),
        MashupRecord("/mashup/m", "M", to_day("2015-01-01"), "deprecated", to_day("2019-01-01")),
    ]
    ds = from_records(recs)
    assert deathpool_window(ds, "2018-01-01", "2020-12-31") == [364]
    assert deathpool_window(ds, "2018-01-01", "2020-12-31", kind="mashup") == [1461]
    assert sorted(deathpool_window(ds, "2018-01-01", "2020-12-31", kind="all")) == [364, 1461]
    assert deathpool_window(ds, "2005-01-01", "2006-01-01") == []
    with pytest.raises(ValueError):
        deathpool_window(ds, "2020-01-01", "2019-01-01")


_dates = st.integers(to_day("2005-01-01"), to_day("2020-12-31"))
_text = st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters=";\r\n\x00"),
                max_size=20)
_name = _text.filter(bool)


@st.composite
def _datasets(draw):
    n_api = draw(st.integers(1, 6))
    recs = []
    for i in range(n_api):
        dp = draw(st.one_of(st.none(), _dates))
        recs.append(ApiRecord(
            f"/api/a{i}", draw(_name), draw(_dates),
            draw(st.sampled_from(["available", "deprecated"])), dp,
            draw(st.one_of(st.none(), st.just(f"https://a{i}.example.org/"))),
            draw(st.sampled_from(["Mapping", "Social", "Tools"])), draw(_text),
            tuple(draw(st.lists(st.sampled_from([f"/api/a{j}" for j in range(n_api)]),
                                max_size=2, unique=True))),
        ))
    for i in range(draw(st.integers(0, 4))):
        recs.append(MashupRecord(
            f"/mashup/m{i}", draw(_name), draw(_dates), "available", None,
            f"https://m{i}.example.net/", "Tools",
            tuple(draw(st.lists(st.sampled_from([f"/api/a{j}" for j in range(n_api)]),
                                min_size=1, max_size=3, unique=True))), draw(_text),
        ))
    return from_records(recs)


@settings(max_examples=60, deadline=None)
@given(_datasets())
def test_round_trip_property(tmp_path_factory, ds):
    d = tmp_path_factory.mktemp("rt")
    write_json_lines(ds, d / "x.jsonl")
    write_csv_pair(ds, d / "csv")
    for again in (parse_dataset(d / "x.jsonl"), parse_dataset(d / "csv", "csv_pair")):
        assert not again.errors
        assert dict(again.apis) == dict(ds.apis)
        assert dict(again.mashups) == dict(ds.mashups)


@settings(max_examples=60, deadline=None)
@given(_datasets())
def test_deathpool_window_subset_property(ds):
    lo, hi = to_day("2018-01-01"), to_day("2020-12-31")
    out = deathpool_window(ds, lo, hi)
    pool = [r.deathpool_date - r.start for r in ds.apis.values() if r.deathpool_date is not None]
    assert all(x >= 0 for x in out)
    assert all(x in pool for x in out)


def test_iso_round_trip():
    assert iso(to_day("2020-09-10")) == "2020-09-10"
    assert to_day("2011-05-16") - to_day("2010-01-01") == 500
