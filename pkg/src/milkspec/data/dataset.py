"""Joined feature/target tables, target discretization, and group summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from milkspec.data.chemistry import ChemistryPanel, GROUP_NAMES
from milkspec.errors import DataFormatError, DegenerateDataError


@dataclass
class Dataset:
    """Feature matrix plus named targets, one row per sample.

    ``features`` is (n_samples, n_features) float64 with NaN marking masked
    chemistry cells; metadata columns (sample id, group, time) are always
    present for every row.
    """

    sample_ids: list[str]
    cow_group: np.ndarray
    time: list[str]
    feature_names: list[str]
    features: np.ndarray
    targets: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.sample_ids)
        if len(set(self.sample_ids)) != n:
            raise DataFormatError("duplicate sample ids in dataset")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DataFormatError("duplicate feature names in dataset")
        if self.features.shape != (n, len(self.feature_names)):
            raise DataFormatError("feature matrix shape does not match names/rows")
        if len(self.cow_group) != n or len(self.time) != n:
            raise DataFormatError("metadata length does not match row count")
        for name, column in self.targets.items():
            if len(column) != n:
                raise DataFormatError(f"target {name!r} length does not match row count")

    @property
    def n_rows(self) -> int:
        return len(self.sample_ids)

    def feature_column(self, name: str) -> np.ndarray:
        return self.features[:, self.feature_names.index(name)]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        return Dataset(
            sample_ids=[self.sample_ids[i] for i in indices],
            cow_group=self.cow_group[indices],
            time=[self.time[i] for i in indices],
            feature_names=list(self.feature_names),
            features=self.features[indices],
            targets={k: v[indices] for k, v in self.targets.items()},
        )

    @classmethod
    def from_panels(cls, panels: list[ChemistryPanel]) -> "Dataset":
        """Chemistry-only dataset: every panel parameter becomes a feature
        column (NaN where masked)."""
        if not panels:
            raise DataFormatError("no chemistry panels")
        names = panels[0].parameters
        for panel in panels[1:]:
            if panel.parameters != names:
                raise DataFormatError(
                    f"panel {panel.sample_id!r} has a different parameter set"
                )
        matrix = np.array([[p.value(name) for name in names] for p in panels], dtype=float)
        return cls(
            sample_ids=[p.sample_id for p in panels],
            cow_group=np.array([p.cow_group for p in panels], dtype=int),
            time=[p.time for p in panels],
            feature_names=list(names),
            features=matrix,
        )


def build_dataset(
    sample_ids: list[str],
    feature_names: list[str],
    features: np.ndarray,
    panels: list[ChemistryPanel],
    target_spec: list[str] = (),
) -> Dataset:
    """Inner-join feature rows with chemistry panels on sample id.

    Every feature row must have a matching panel (the join never drops rows
    silently); panels without features are simply left out. ``target_spec``
    names the panel columns to materialize as targets; the labels
    ``cow_group`` and ``time`` are always available as targets implicitly.
    """
    features = np.asarray(features, dtype=float)
    if features.shape != (len(sample_ids), len(feature_names)):
        raise DataFormatError("feature matrix shape does not match ids/names")
    by_id: dict[str, ChemistryPanel] = {}
    for panel in panels:
        if panel.sample_id in by_id:
            raise DataFormatError(f"duplicate panel sample_id {panel.sample_id!r}")
        by_id[panel.sample_id] = panel
    if len(set(sample_ids)) != len(sample_ids):
        raise DataFormatError("duplicate sample ids among feature rows")

    matched = []
    for sample_id in sample_ids:
        if sample_id not in by_id:
            raise DataFormatError(f"feature row {sample_id!r} has no chemistry panel")
        matched.append(by_id[sample_id])

    targets: dict[str, np.ndarray] = {}
    for name in target_spec:
        if name == "cow_group":
            targets[name] = np.array([p.cow_group for p in matched], dtype=int)
        elif name == "time":
            targets[name] = np.array([0 if p.time == "T0" else 1 for p in matched], dtype=int)
        else:
            try:
                targets[name] = np.array([p.value(name) for p in matched], dtype=float)
            except KeyError:
                raise DataFormatError(f"target {name!r} not present in panels") from None

    return Dataset(
        sample_ids=list(sample_ids),
        cow_group=np.array([p.cow_group for p in matched], dtype=int),
        time=[p.time for p in matched],
        feature_names=list(feature_names),
        features=features,
        targets=targets,
    )


def discretize_target(values, scheme="median_split", k: int = 2) -> np.ndarray:
    """Turn a continuous target into class labels.

    ``median_split``: label 0 iff value <= median. ``quantile``: k classes
    cut at the empirical quantiles j/k, ties assigned to the lower class.
    A constant target cannot be split and raises.
    """
    values = np.asarray(values, dtype=float)
    if np.any(np.isnan(values)):
        raise DegenerateDataError("target contains masked values; filter rows first")
    if np.unique(values).size < 2:
        raise DegenerateDataError("target is constant; cannot discretize")
    if scheme == "median_split":
        return (values > np.median(values)).astype(int)
    if scheme == "quantile":
        if k < 2:
            raise DegenerateDataError("quantile scheme needs k >= 2")
        edges = np.quantile(values, [j / k for j in range(1, k)])
        # a value equal to an edge is not above it, hence the lower class
        return np.sum(values[:, None] > edges[None, :], axis=1).astype(int)
    raise DataFormatError(f"unknown discretization scheme {scheme!r}")


@dataclass(frozen=True)
class SummaryCell:
    group: str
    time: str | None
    parameter: str
    mean: float
    sd: float  # NaN when undefined (n == 1)
    cv: float  # NaN when mean == 0 or sd undefined
    n: int

    @property
    def sd_defined(self) -> bool:
        return not math.isnan(self.sd)

    def render(self) -> str:
        if not self.sd_defined:
            return f"{self.mean:.2f}"
        return f"{self.mean:.2f} ± {self.sd:.2f}"


@dataclass
class GroupSummary:
    """Mean / sample-sd / cv per (group[, time], parameter)."""

    by_time: bool
    cells: list[SummaryCell]

    def cell(self, group: str, time: str | None, parameter: str) -> SummaryCell:
        for c in self.cells:
            if c.group == group and c.time == time and c.parameter == parameter:
                return c
        raise KeyError((group, time, parameter))

    def render_text(self) -> str:
        parameters = []
        for c in self.cells:
            if c.parameter not in parameters:
                parameters.append(c.parameter)
        columns = []
        for c in self.cells:
            key = (c.group, c.time)
            if key not in columns:
                columns.append(key)
        headers = [g if t is None else f"{g} {t}" for g, t in columns]
        width = max(12, max(len(p) for p in parameters) + 2)
        col_width = max(14, max(len(h) for h in headers) + 2)
        lines = ["Parameter".ljust(width) + "".join(h.rjust(col_width) for h in headers)]
        for parameter in parameters:
            row = [parameter.ljust(width)]
            for group, time in columns:
                try:
                    row.append(self.cell(group, time, parameter).render().rjust(col_width))
                except KeyError:
                    row.append("-".rjust(col_width))
            lines.append("".join(row))
        return "\n".join(lines) + "\n"

    def to_rows(self) -> list[dict]:
        return [
            {
                "group": c.group,
                "time": c.time,
                "parameter": c.parameter,
                "mean": c.mean,
                "sd": c.sd,
                "cv": c.cv,
                "n": c.n,
            }
            for c in self.cells
        ]


def group_summary(dataset: Dataset, by_time: bool = True) -> GroupSummary:
    """Descriptive statistics per treatment group (optionally per time).

    Masked values are dropped per parameter (pairwise deletion). The sd uses
    divisor n-1 and is NaN for single-observation groups; cv = sd/mean is
    NaN when the mean is zero.
    """
    keys: list[tuple[int, str | None]] = []
    for code, time in zip(dataset.cow_group, dataset.time):
        key = (int(code), time if by_time else None)
        if key not in keys:
            keys.append(key)
    keys.sort(key=lambda k: (k[1] or "", k[0]))

    cells = []
    for code, time in keys:
        mask = dataset.cow_group == code
        if by_time:
            mask = mask & np.array([t == time for t in dataset.time])
        if not mask.any():
            raise DegenerateDataError(f"empty group {(code, time)}")
        block = dataset.features[mask]
        for j, parameter in enumerate(dataset.feature_names):
            column = block[:, j]
            column = column[~np.isnan(column)]
            n = column.size
            if n == 0:
                continue  # parameter entirely masked in this group
            mean = float(column.mean())
            sd = float(column.std(ddof=1)) if n > 1 else math.nan
            cv = sd / mean if (not math.isnan(sd) and mean != 0.0) else math.nan
            cells.append(
                SummaryCell(
                    group=GROUP_NAMES[code],
                    time=time,
                    parameter=parameter,
                    mean=mean,
                    sd=sd,
                    cv=cv,
                    n=n,
                )
            )
    if not cells:
        raise DegenerateDataError("no data to summarize")
    return GroupSummary(by_time=by_time, cells=cells)
