"""Day-resolution date helpers.

Every date in the package is an ``int`` counting days since 1970-01-01.
"""
from __future__ import annotations

import datetime as _dt
from typing import Union

DateLike = Union[int, str, _dt.date]

_EPOCH_ORDINAL = _dt.date(1970, 1, 1).toordinal()


def to_day(value: DateLike) -> int:
    """Convert an ISO string, ``date`` or day number to a day number."""
    if isinstance(value, bool):
        raise TypeError("bool is not a date")
    if isinstance(value, int):
        return value
    if isinstance(value, _dt.datetime):
        value = value.date()
    if isinstance(value, _dt.date):
        return value.toordinal() - _EPOCH_ORDINAL
    if isinstance(value, str):
        return _dt.date.fromisoformat(value.strip()[:10]).toordinal() - _EPOCH_ORDINAL
    raise TypeError(f"cannot interpret {value!r} as a date")


def from_day(day: int) -> _dt.date:
    return _dt.date.fromordinal(int(day) + _EPOCH_ORDINAL)


def iso(day: int | None) -> str | None:
    return None if day is None else from_day(day).isoformat()


def year_of(day: int) -> int:
    return from_day(day).year


def period_starts(start: DateLike, end: DateLike, cadence: str) -> list[int]:
    """Period boundaries (first day of each day/month/year) within ``[start, end]``.

    For ``monthly`` and ``yearly`` the first boundary is the start of the
    period containing ``start``.
    """
    lo, hi = to_day(start), to_day(end)
    if lo > hi:
        raise ValueError("empty date range")
    if cadence == "daily":
        return list(range(lo, hi + 1))
    d = from_day(lo)
    if cadence == "monthly":
        cur = _dt.date(d.year, d.month, 1)
    elif cadence == "yearly":
        cur = _dt.date(d.year, 1, 1)
    else:
        raise ValueError(f"unknown cadence {cadence!r}")
    out = []
    while to_day(cur) <= hi:
        out.append(to_day(cur))
        if cadence == "monthly":
            cur = _dt.date(cur.year + cur.month // 12, cur.month % 12 + 1, 1)
        else:
            cur = _dt.date(cur.year + 1, 1, 1)
    return out
