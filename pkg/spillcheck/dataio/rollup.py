"""Daily to weekly aggregation on a fixed week grid."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# Weeks run Friday to Thursday from this Friday.
DEFAULT_WEEK_ANCHOR = "2020-03-06"


@dataclass(frozen=True)
class CaseDifferencing:
    """Clamped corrections made while differencing cumulative counts."""

    clamp_count: int
    clamped_total: float


def difference_cumulative(cumulative: pd.DataFrame) -> tuple[pd.DataFrame, CaseDifferencing]:
    """New cases per day from a county x date table of cumulative counts.

    The first date only serves as the baseline and is dropped. A count that
    falls below an earlier maximum is a reporting correction: its new cases
    are 0 and it is counted, so the new cases of a county always sum to its
    maximum cumulative count minus its initial count.
    """
    if cumulative.shape[1] < 2:
        raise ValueError("Need at least two dates of cumulative counts to difference")
    values = cumulative.to_numpy(dtype=float)
    if np.isnan(values).any():
        raise ValueError("Cumulative counts must be complete; fill gaps before differencing")
    running = np.maximum.accumulate(values, axis=1)
    raw = np.diff(values, axis=1)
    new = np.diff(running, axis=1)
    dips = raw < 0
    report = CaseDifferencing(clamp_count=int(dips.sum()), clamped_total=float(-raw[dips].sum()))
    if report.clamp_count:
        logger.warning(
            "Cumulative counts decreased on %d county-days (total %g); clamped to 0 new cases",
            report.clamp_count,
            report.clamped_total,
        )
    return pd.DataFrame(new, index=cumulative.index, columns=cumulative.columns[1:]), report


def week_starts(
    start: str | pd.Timestamp,
    end: str | pd.Timestamp,
    anchor: str | pd.Timestamp = DEFAULT_WEEK_ANCHOR,
) -> pd.DatetimeIndex:
    """First days of the complete anchor-aligned weeks inside [start, end]."""
    start, end, anchor = pd.Timestamp(start), pd.Timestamp(end), pd.Timestamp(anchor)
    if end < start:
        raise ValueError(f"end date {end.date()} is before start date {start.date()}")
    offset = (start - anchor).days % 7
    first = start if offset == 0 else start + pd.Timedelta(days=7 - offset)
    starts = pd.date_range(first, end, freq="7D")
    return starts[starts + pd.Timedelta(days=6) <= end]


def weekly_rollup(
    daily: pd.DataFrame,
    how: Literal["mean", "sum"],
    start: str | pd.Timestamp,
    end: str | pd.Timestamp,
    anchor: str | pd.Timestamp = DEFAULT_WEEK_ANCHOR,
) -> pd.DataFrame:
    """Aggregate a county x date table into complete weeks, columns labelled by week start.

    Every day of every counted week must be present and non-missing;
    partial weeks at either end are dropped.
    """
    weeks = week_starts(start, end, anchor)
    if len(weeks) == 0:
        raise ValueError(f"No complete week between {start} and {end} for anchor {anchor}")
    days = pd.date_range(weeks[0], weeks[-1] + pd.Timedelta(days=6), freq="D")
    frame = daily.copy()
    frame.columns = pd.to_datetime(frame.columns)
    absent = days.difference(frame.columns)
    if len(absent):
        raise ValueError(
            f"{len(absent)} days missing from the daily table, first {absent[0].date()}"
        )
    frame = frame[days]
    gaps = frame.isna().to_numpy()
    if gaps.any():
        j, t = np.argwhere(gaps)[0]
        raise ValueError(
            f"{int(gaps.sum())} county-days still missing in counted weeks, "
            f"first county {frame.index[j]} on {days[t].date()}"
        )

    values = frame.to_numpy(dtype=float).reshape(frame.shape[0], len(weeks), 7)
    reduced = values.mean(axis=2) if how == "mean" else values.sum(axis=2)
    dropped = (pd.Timestamp(end) - pd.Timestamp(start)).days + 1 - len(days)
    if dropped:
        logger.info("Dropped %d days outside complete weeks", dropped)
    return pd.DataFrame(reduced, index=frame.index, columns=[str(w.date()) for w in weeks])
