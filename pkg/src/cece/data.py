"""Trial data ingestion, validation, and summarization.

Subject-level records come in three analysis modes:

* ``binary-point``: a single binary outcome per subject.
* ``nonneg-point``: a single non-negative real outcome per subject.
* ``time-to-event``: discrete follow-up intervals 1..K with event and
  censoring interval columns; censoring precedes events within an interval.

The CSV schema is ``id, arm, y[, e][, l1..lm][, event_interval,
censor_interval]`` with a header row; an empty cell means the optional value
is absent.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Mapping, Sequence

import numpy as np

from .errors import InputError, PositivityError

MODE_BINARY = "binary-point"
MODE_NONNEG = "nonneg-point"
MODE_TTE = "time-to-event"
MODES = (MODE_BINARY, MODE_NONNEG, MODE_TTE)

# CLI spelling -> internal mode name.
MODE_ALIASES = {"point": MODE_BINARY, "nonneg": MODE_NONNEG, "tte": MODE_TTE}

_STRATUM_COL = re.compile(r"^l(\d+)$")


@dataclass(frozen=True)
class SubjectRecord:
    """One trial participant."""

    id: str
    arm: int
    outcome: float | None = None
    strata: tuple[str, ...] | None = None
    exposure: int | None = None
    event_interval: int | None = None
    censor_interval: int | None = None


@dataclass(frozen=True)
class SubjectTable:
    """Validated, immutable collection of subject records."""

    records: tuple[SubjectRecord, ...]
    mode: str
    interval_count: int | None = None
    schema_flags: frozenset[str] = field(default_factory=frozenset)

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def has_strata(self) -> bool:
        return "strata" in self.schema_flags

    @property
    def has_exposure(self) -> bool:
        return "exposure" in self.schema_flags


@dataclass(frozen=True)
class ArmSummary:
    """Per-arm (and optionally per-stratum) outcome summaries.

    ``n``, ``mean_outcome`` and ``var_outcome`` are indexed by arm, so
    ``mean_outcome[1]`` estimates the mean outcome under vaccine.  Variances
    are population variances of the outcome within the arm; in binary mode
    they equal ``p * (1 - p)`` exactly.
    """

    n: tuple[int, int]
    mean_outcome: tuple[float, float]
    var_outcome: tuple[float, float]
    mode: str
    strata: tuple[str, ...] | None = None
    n_by_stratum: Mapping[str, tuple[int, int]] | None = None
    mean_by_stratum: Mapping[str, tuple[float, float]] | None = None
    var_by_stratum: Mapping[str, tuple[float, float]] | None = None
    stratum_weights: Mapping[str, float] | None = None

    @classmethod
    def from_aggregates(
        cls,
        mu1: float,
        mu0: float,
        n1: int,
        n0: int,
        mode: str = MODE_BINARY,
    ) -> "ArmSummary":
        """Build a summary from published per-arm aggregates."""
        if mode == MODE_BINARY:
            for name, mu in (("mu0", mu0), ("mu1", mu1)):
                if not 0.0 <= mu <= 1.0:
                    raise InputError(f"{name}={mu} outside [0, 1] in binary mode")
            var = (mu0 * (1.0 - mu0), mu1 * (1.0 - mu1))
        else:
            var = (0.0, 0.0)
        if n0 < 1 or n1 < 1:
            raise PositivityError("both arms need at least one subject")
        return cls(
            n=(int(n0), int(n1)),
            mean_outcome=(float(mu0), float(mu1)),
            var_outcome=var,
            mode=mode,
        )


@dataclass(frozen=True)
class DiscreteEventTable:
    """Per-arm, per-interval risk sets with the (censor, expose, event) order.

    ``at_risk[a, k-1]`` counts subjects entering interval k event-free and
    uncensored; censoring removes subjects before events can occur in the
    same interval.
    """

    at_risk: np.ndarray  # shape (2, K), int
    censored: np.ndarray  # shape (2, K), int
    events: np.ndarray  # shape (2, K), int

    @property
    def interval_count(self) -> int:
        return self.at_risk.shape[1]

    def __post_init__(self):
        for arr in (self.at_risk, self.censored, self.events):
            if arr.shape != self.at_risk.shape or arr.ndim != 2 or arr.shape[0] != 2:
                raise ValueError("count arrays must share shape (2, K)")
        k = self.interval_count
        for a in (0, 1):
            for j in range(k):
                if self.events[a, j] > self.at_risk[a, j] - self.censored[a, j]:
                    raise ValueError(
                        f"arm {a}, interval {j + 1}: events exceed uncensored risk set"
                    )
                if j + 1 < k:
                    expected = self.at_risk[a, j] - self.censored[a, j] - self.events[a, j]
                    if self.at_risk[a, j + 1] != expected:
                        raise ValueError(
                            f"arm {a}, interval {j + 2}: risk-set recursion violated"
                        )


def _parse_int(value: str, what: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"{what} is not an integer: {value!r}", line) from None


def _parse_float(value: str, what: str, line: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise InputError(f"{what} is not a number: {value!r}", line) from None


def _open_source(source: str | Path | IO[str]) -> tuple[IO[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", newline="", encoding="utf-8"), True
    return source, False


def load_subject_table(
    source: str | Path | IO[str],
    mode: str,
    interval_count: int | None = None,
    necessity_consistent: bool = False,
) -> SubjectTable:
    """Load and validate a subject-level CSV.

    ``interval_count`` fixes K in time-to-event mode; when omitted, K is
    inferred as the largest interval index seen.  ``necessity_consistent``
    additionally enforces ``y <= e`` when the exposure column is present in
    binary mode.
    """
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise InputError(f"unknown mode: {mode!r}")

    stream, owned = _open_source(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError("empty input") from None
        header = [h.strip() for h in header]
        columns = _validate_header(header, mode)

        records: list[SubjectRecord] = []
        max_interval = 0
        for line_no, row in enumerate(reader, start=2):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"expected {len(header)} cells, found {len(row)}", line_no
                )
            cells = {name: row[i].strip() for i, name in enumerate(header)}
            rec = _parse_record(cells, columns, mode, necessity_consistent, line_no)
            if interval_count is not None:
                for what, val in (
                    ("event_interval", rec.event_interval),
                    ("censor_interval", rec.censor_interval),
                ):
                    if val is not None and val > interval_count:
                        raise InputError(
                            f"{what}={val} exceeds interval count K={interval_count}",
                            line_no,
                        )
            for val in (rec.event_interval, rec.censor_interval):
                if val is not None:
                    max_interval = max(max_interval, val)
            records.append(rec)

        if not records:
            raise InputError("no data rows in input")

        flags = set()
        if columns["strata"]:
            flags.add("strata")
        if "e" in columns["present"]:
            flags.add("exposure")

        k = None
        if mode == MODE_TTE:
            k = interval_count if interval_count is not None else max(max_interval, 1)
        return SubjectTable(
            records=tuple(records),
            mode=mode,
            interval_count=k,
            schema_flags=frozenset(flags),
        )
    finally:
        if owned:
            stream.close()


def _validate_header(header: Sequence[str], mode: str) -> dict:
    known = {"id", "arm", "y", "e", "event_interval", "censor_interval"}
    strata_cols: list[tuple[int, str]] = []
    for name in header:
        m = _STRATUM_COL.match(name)
        if m:
            strata_cols.append((int(m.group(1)), name))
        elif name not in known:
            raise InputError(f"unknown column: {name!r}")
    if len(set(header)) != len(header):
        raise InputError("duplicate column in header")
    present = set(header)
    for required in ("id", "arm"):
        if required not in present:
            raise InputError(f"missing required column: {required!r}")
    if mode in (MODE_BINARY, MODE_NONNEG):
        if "y" not in present:
            raise InputError("missing required column: 'y'")
        for col in ("event_interval", "censor_interval"):
            if col in present:
                raise InputError(f"column {col!r} is only valid in time-to-event mode")
    else:
        for col in ("event_interval", "censor_interval"):
            if col not in present:
                raise InputError(f"missing required column: {col!r}")
    strata_cols.sort()
    return {"present": present, "strata": [name for _, name in strata_cols]}


def _parse_record(
    cells: Mapping[str, str],
    columns: Mapping,
    mode: str,
    necessity_consistent: bool,
    line_no: int,
) -> SubjectRecord:
    subject_id = cells["id"]
    if not subject_id:
        raise InputError("missing subject id", line_no)

    arm = _parse_int(cells["arm"], "arm", line_no)
    if arm not in (0, 1):
        raise InputError(f"arm out of range: {arm} (must be 0 or 1)", line_no)

    outcome = None
    if "y" in columns["present"]:
        raw = cells["y"]
        if raw == "":
            if mode != MODE_TTE:
                raise InputError("missing outcome 'y'", line_no)
        else:
            outcome = _parse_float(raw, "outcome 'y'", line_no)
            if outcome < 0:
                raise InputError(f"outcome must be non-negative, got {outcome}", line_no)
            if mode == MODE_BINARY and outcome not in (0.0, 1.0):
                raise InputError(
                    f"outcome must be 0 or 1 in binary mode, got {outcome}", line_no
                )

    exposure = None
    if "e" in columns["present"] and cells["e"] != "":
        exposure = _parse_int(cells["e"], "exposure 'e'", line_no)
        if exposure not in (0, 1):
            raise InputError(f"exposure out of range: {exposure}", line_no)
        if (
            necessity_consistent
            and mode == MODE_BINARY
            and outcome is not None
            and outcome > exposure
        ):
            raise InputError(
                "necessity-consistency violated: outcome 1 with exposure 0", line_no
            )

    strata = None
    if columns["strata"]:
        values = []
        for col in columns["strata"]:
            if cells[col] == "":
                raise InputError(f"missing stratum value in column {col!r}", line_no)
            values.append(cells[col])
        strata = tuple(values)

    event_interval = None
    censor_interval = None
    if mode == MODE_TTE:
        if cells["event_interval"] != "":
            event_interval = _parse_int(cells["event_interval"], "event_interval", line_no)
            if event_interval < 1:
                raise InputError(f"event_interval must be >= 1, got {event_interval}", line_no)
        if cells["censor_interval"] != "":
            censor_interval = _parse_int(
                cells["censor_interval"], "censor_interval", line_no
            )
            if censor_interval < 1:
                raise InputError(
                    f"censor_interval must be >= 1, got {censor_interval}", line_no
                )
        if event_interval is not None and censor_interval is not None:
            if censor_interval <= event_interval:
                raise InputError(
                    "subject has both censor_interval and event_interval but "
                    "censoring precedes events within an interval; a subject "
                    f"censored at interval {censor_interval} cannot have an event "
                    f"at interval {event_interval}",
                    line_no,
                )
            raise InputError(
                "event_interval terminates follow-up; censor_interval "
                f"{censor_interval} after event at {event_interval} is inconsistent",
                line_no,
            )

    return SubjectRecord(
        id=subject_id,
        arm=arm,
        outcome=outcome,
        strata=strata,
        exposure=exposure,
        event_interval=event_interval,
        censor_interval=censor_interval,
    )


def write_subject_table(table: SubjectTable, dest: str | Path | IO[str]) -> None:
    """Serialize a table back to the CSV schema (round-trip safe)."""
    header = ["id", "arm"]
    if table.mode != MODE_TTE or any(r.outcome is not None for r in table.records):
        header.append("y")
    if table.has_exposure:
        header.append("e")
    n_strata = len(table.records[0].strata) if table.has_strata else 0
    header.extend(f"l{i + 1}" for i in range(n_strata))
    if table.mode == MODE_TTE:
        header.extend(["event_interval", "censor_interval"])

    stream, owned = (
        (open(dest, "w", newline="", encoding="utf-8"), True)
        if isinstance(dest, (str, Path))
        else (dest, False)
    )
    try:
        writer = csv.writer(stream)
        writer.writerow(header)
        for rec in table.records:
            row: list[str] = [rec.id, str(rec.arm)]
            if "y" in header:
                row.append("" if rec.outcome is None else _format_number(rec.outcome))
            if table.has_exposure:
                row.append("" if rec.exposure is None else str(rec.exposure))
            if table.has_strata:
                row.extend(rec.strata)
            if table.mode == MODE_TTE:
                row.append("" if rec.event_interval is None else str(rec.event_interval))
                row.append("" if rec.censor_interval is None else str(rec.censor_interval))
            writer.writerow(row)
    finally:
        if owned:
            stream.close()


def _format_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def summarize_arms(table: SubjectTable) -> ArmSummary:
    """Empirical per-arm (and per-stratum) outcome means and weights."""
    if table.mode == MODE_TTE:
        raise InputError("summarize_arms requires a point-outcome mode")

    by_arm: dict[int, list[float]] = {0: [], 1: []}
    for rec in table.records:
        by_arm[rec.arm].append(rec.outcome)
    for arm, label in ((0, "control"), (1, "vaccine")):
        if not by_arm[arm]:
            raise PositivityError(f"positivity violated: no {label} subjects")

    n = (len(by_arm[0]), len(by_arm[1]))
    means = tuple(float(np.mean(by_arm[a])) for a in (0, 1))
    variances = tuple(float(np.var(by_arm[a])) for a in (0, 1))

    strata = None
    n_by_stratum = mean_by_stratum = var_by_stratum = weights = None
    if table.has_strata:
        groups: dict[str, dict[int, list[float]]] = {}
        for rec in table.records:
            code = "|".join(rec.strata)
            groups.setdefault(code, {0: [], 1: []})[rec.arm].append(rec.outcome)
        strata = tuple(sorted(groups))
        n_by_stratum = {}
        mean_by_stratum = {}
        var_by_stratum = {}
        weights = {}
        total = table.n
        for code in strata:
            cells = groups[code]
            n_by_stratum[code] = (len(cells[0]), len(cells[1]))
            mean_by_stratum[code] = tuple(
                float(np.mean(cells[a])) if cells[a] else float("nan") for a in (0, 1)
            )
            var_by_stratum[code] = tuple(
                float(np.var(cells[a])) if cells[a] else float("nan") for a in (0, 1)
            )
            weights[code] = (len(cells[0]) + len(cells[1])) / total

    return ArmSummary(
        n=n,
        mean_outcome=means,
        var_outcome=variances,
        mode=table.mode,
        strata=strata,
        n_by_stratum=n_by_stratum,
        mean_by_stratum=mean_by_stratum,
        var_by_stratum=var_by_stratum,
        stratum_weights=weights,
    )


def build_event_table(table: SubjectTable) -> DiscreteEventTable:
    """Count risk sets, censorings, and events per arm and interval.

    Subjects with neither an event nor a censoring interval are followed
    through K and remain at risk throughout (administratively complete
    follow-up, never counted as censored).
    """
    if table.mode != MODE_TTE:
        raise InputError("build_event_table requires time-to-event mode")
    k = table.interval_count
    censored = np.zeros((2, k), dtype=np.int64)
    events = np.zeros((2, k), dtype=np.int64)
    n_arm = np.zeros(2, dtype=np.int64)
    for rec in table.records:
        n_arm[rec.arm] += 1
        if rec.censor_interval is not None:
            if rec.censor_interval > k:
                raise InputError(
                    f"censor_interval {rec.censor_interval} exceeds K={k}"
                )
            censored[rec.arm, rec.censor_interval - 1] += 1
        elif rec.event_interval is not None:
            if rec.event_interval > k:
                raise InputError(f"event_interval {rec.event_interval} exceeds K={k}")
            events[rec.arm, rec.event_interval - 1] += 1

    at_risk = np.zeros((2, k), dtype=np.int64)
    at_risk[:, 0] = n_arm
    for j in range(1, k):
        at_risk[:, j] = at_risk[:, j - 1] - censored[:, j - 1] - events[:, j - 1]
    return DiscreteEventTable(at_risk=at_risk, censored=censored, events=events)
