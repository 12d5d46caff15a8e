"""Batch pipeline: configuration, stage execution, and the report bundle.

Stages run sequentially in dependency order; each stage writes its
artifacts (CSV tables, JSON/text reports, SVG figures) into the output
directory and registers them in the manifest with a content hash. A stage
failure is recorded as a diagnostic and never touches the artifacts of
stages that already completed.
"""

from __future__ import annotations

import csv
import glob
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from milkspec import __version__
from milkspec.data.chemistry import GROUP_NAMES, read_chemistry_csv
from milkspec.data.dataset import Dataset, discretize_target, group_summary
from milkspec.data.envi import extract_center_roi, extract_roi_block, read_cube_file, roi_mean_spectrum
from milkspec.errors import ConfigError, DataFormatError, DegenerateDataError, MilkspecError
from milkspec.figures import render_confusion_svg, render_qq_svg, render_scatter_svg
from milkspec.imaging import FEATURE_NAMES, GlcmConfig, extract_feature_vector, load_patch
from milkspec.learn.cluster import cluster_validate
from milkspec.learn.metrics import classification_report, render_report_text, report_to_dict
from milkspec.learn.models import ModelSpec, fit_model
from milkspec.learn.split import SplitSpec, split_indices
from milkspec.stats.anova import anova_twoway, render_factor_table
from milkspec.stats.correlation import band_significance, correlation
from milkspec.stats.mnf import estimate_noise_covariance
from milkspec.stats.ols import ols_fit, ols_to_dict, qq_points, render_ols_text
from milkspec.stats.pca import pca
from milkspec.unsupervised import spectral_cluster_pipeline

ANALYSES = (
    "group_summary",
    "correlate",
    "pca",
    "regress",
    "classify",
    "mnf_cluster",
    "cluster_validate",
)

# the two ingestion stages are selectable on their own so the CLI can
# materialize spectra / image features without running any analysis
SELECTABLE = ("ingest", "features", *ANALYSES)

_STAGE_ORDER = ("ingest", "features", *ANALYSES)

_PATCH_EXTENSIONS = (".ppm", ".pgm", ".png", ".bmp", ".jpg", ".jpeg", ".tif", ".tiff")

_STOCHASTIC = {"classify", "mnf_cluster", "cluster_validate"}

_MODEL_LABELS = {
    "knn": "k-NN",
    "tree": "Decision Tree",
    "forest": "Random Forest",
    "linear_svm": "Linear SVM",
    "mlp": "MLP",
}


@dataclass(frozen=True)
class PipelineConfig:
    analyses: tuple[str, ...]
    out_dir: str
    seed: int | None = None
    chemistry_csv: str | None = None
    cube_dir: str | None = None
    patch_dir: str | None = None
    roi_side: int = 64
    glcm: GlcmConfig = GlcmConfig()
    group_summary: dict = field(default_factory=dict)
    correlate: dict = field(default_factory=dict)
    pca: dict = field(default_factory=dict)
    regress: dict = field(default_factory=dict)
    classify: dict = field(default_factory=dict)
    mnf_cluster: dict = field(default_factory=dict)
    cluster_validate: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        known = {
            "analyses", "out_dir", "seed", "chemistry_csv", "cube_dir",
            "patch_dir", "roi_side", "glcm", *ANALYSES,
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        analyses = raw.get("analyses")
        if not analyses:
            raise ConfigError("config must select at least one analysis")
        bad = [a for a in analyses if a not in SELECTABLE]
        if bad:
            raise ConfigError(f"unknown analysis selection(s): {', '.join(bad)}")
        if "out_dir" not in raw:
            raise ConfigError("config must name an out_dir")
        seed = raw.get("seed")
        if seed is None and _STOCHASTIC & set(analyses):
            raise ConfigError("a seed is mandatory for stochastic analyses")

        glcm_raw = raw.get("glcm", {})
        glcm = GlcmConfig(
            levels=int(glcm_raw.get("levels", 8)),
            offset=tuple(glcm_raw.get("offset", (0, 1))),
            plane=glcm_raw.get("plane", "luminance"),
        )
        roi_side = int(raw.get("roi_side", 64))
        if roi_side < 1:
            raise ConfigError("roi_side must be >= 1")
        return cls(
            analyses=tuple(analyses),
            out_dir=raw["out_dir"],
            seed=None if seed is None else int(seed),
            chemistry_csv=raw.get("chemistry_csv"),
            cube_dir=raw.get("cube_dir"),
            patch_dir=raw.get("patch_dir"),
            roi_side=roi_side,
            glcm=glcm,
            group_summary=dict(raw.get("group_summary", {})),
            correlate=dict(raw.get("correlate", {})),
            pca=dict(raw.get("pca", {})),
            regress=dict(raw.get("regress", {})),
            classify=dict(raw.get("classify", {})),
            mnf_cluster=dict(raw.get("mnf_cluster", {})),
            cluster_validate=dict(raw.get("cluster_validate", {})),
        )

    def to_canonical_json(self) -> str:
        # out_dir is excluded: it names where artifacts land, not what gets
        # computed, and must not perturb the reproducibility hash
        payload = {
            "analyses": list(self.analyses),
            "seed": self.seed,
            "chemistry_csv": self.chemistry_csv,
            "cube_dir": self.cube_dir,
            "patch_dir": self.patch_dir,
            "roi_side": self.roi_side,
            "glcm": {"levels": self.glcm.levels, "offset": list(self.glcm.offset), "plane": self.glcm.plane},
            "group_summary": self.group_summary,
            "correlate": self.correlate,
            "pca": self.pca,
            "regress": self.regress,
            "classify": self.classify,
            "mnf_cluster": self.mnf_cluster,
            "cluster_validate": self.cluster_validate,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


@dataclass
class ReportBundle:
    out_dir: str
    manifest: dict
    artifacts: dict[str, str]
    diagnostics: list[dict]

    @property
    def failed_stages(self) -> list[str]:
        return [d["stage"] for d in self.diagnostics if d.get("kind") == "failure"]


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def _json_sanitize(obj):
    """Strict-JSON payloads: non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _json_sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_sanitize(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


class _Writer:
    """Writes artifacts under the bundle directory and records their hashes."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.records: list[dict] = []
        os.makedirs(out_dir, exist_ok=True)

    def _register(self, name: str, payload: bytes) -> str:
        path = os.path.join(self.out_dir, name)
        with open(path, "wb") as fh:
            fh.write(payload)
        self.records.append(
            {"name": name, "sha256": hashlib.sha256(payload).hexdigest(), "bytes": len(payload)}
        )
        return path

    def text(self, name: str, content: str) -> str:
        return self._register(name, content.encode("utf-8"))

    def json(self, name: str, obj) -> str:
        payload = json.dumps(_json_sanitize(obj), indent=2, sort_keys=True) + "\n"
        return self._register(name, payload.encode("utf-8"))

    def csv(self, name: str, header: list[str], rows) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(cell) for cell in row])
        return self._register(name, buffer.getvalue().encode("utf-8"))


class _RunContext:
    def __init__(self):
        self.panels = None
        self.panel_by_id = {}
        self.spectra_ids: list[str] = []
        self.spectra: np.ndarray | None = None  # (samples, bands)
        self.wavelengths = None
        self.roi_blocks: dict[str, np.ndarray] = {}
        self.feature_ids: list[str] = []
        self.feature_matrix: np.ndarray | None = None
        self.cluster_result = None
        self.pixel_sample_ids: list[str] = []


def _require(condition: bool, message: str):
    if not condition:
        raise DataFormatError(message)


def _stage_ingest(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    _require(
        config.chemistry_csv is not None or config.cube_dir is not None,
        "ingest needs a chemistry_csv and/or a cube_dir",
    )
    if config.chemistry_csv is not None:
        _require(os.path.isfile(config.chemistry_csv), f"chemistry csv not found: {config.chemistry_csv}")
        ctx.panels = read_chemistry_csv(config.chemistry_csv)
        ctx.panel_by_id = {p.sample_id: p for p in ctx.panels}
        parameters = ctx.panels[0].parameters
        writer.csv(
            "chemistry_panels.csv",
            ["sample_id", "group", "time", *parameters],
            [
                [p.sample_id, p.group_name, p.time, *(p.value(name) for name in parameters)]
                for p in ctx.panels
            ],
        )

    if config.cube_dir is not None:
        _require(os.path.isdir(config.cube_dir), f"cube directory not found: {config.cube_dir}")
        header_files = sorted(glob.glob(os.path.join(config.cube_dir, "*.hdr")))
        _require(bool(header_files), f"no .hdr files in {config.cube_dir}")
        rows = []
        for header_path in header_files:
            sample_id = os.path.splitext(os.path.basename(header_path))[0]
            cube = read_cube_file(header_path)
            side = config.roi_side
            if side > min(cube.header.lines, cube.header.samples):
                raise DataFormatError(
                    f"ingest: ROI side {side} exceeds cube {sample_id!r} "
                    f"({cube.header.lines}x{cube.header.samples})"
                )
            roi = extract_center_roi(cube.header.lines, cube.header.samples, side)
            spectrum = roi_mean_spectrum(cube, roi, sample_id)
            ctx.roi_blocks[sample_id] = extract_roi_block(cube, roi)
            ctx.spectra_ids.append(sample_id)
            rows.append([sample_id, *spectrum.mean_reflectance.tolist()])
            if ctx.wavelengths is None and cube.header.wavelengths is not None:
                ctx.wavelengths = list(cube.header.wavelengths.wavelengths_nm)
        ctx.spectra = np.array([row[1:] for row in rows], dtype=float)
        band_names = (
            [f"wl_{w:g}" for w in ctx.wavelengths]
            if ctx.wavelengths is not None
            else [f"band_{i}" for i in range(ctx.spectra.shape[1])]
        )
        writer.csv("roi_spectra.csv", ["sample_id", *band_names], rows)


def _stage_features(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    _require(config.patch_dir is not None, "features needs a patch_dir")
    _require(os.path.isdir(config.patch_dir), f"patch directory not found: {config.patch_dir}")
    paths = sorted(
        p
        for p in glob.glob(os.path.join(config.patch_dir, "*"))
        if os.path.splitext(p)[1].lower() in _PATCH_EXTENSIONS
    )
    _require(bool(paths), f"no image files in {config.patch_dir}")
    rows = []
    for path in paths:
        sample_id = os.path.splitext(os.path.basename(path))[0]
        vector = extract_feature_vector(load_patch(path), config.glcm)
        ctx.feature_ids.append(sample_id)
        rows.append([sample_id, *vector.as_array().tolist()])
    ctx.feature_matrix = np.array([row[1:] for row in rows], dtype=float)
    writer.csv("image_features.csv", ["sample_id", *FEATURE_NAMES], rows)


def _stage_group_summary(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    _require(ctx.panels is not None, "group_summary needs chemistry panels")
    dataset = Dataset.from_panels(ctx.panels)
    by_time = bool(config.group_summary.get("by_time", True))
    summary = group_summary(dataset, by_time=by_time)
    writer.csv(
        "group_summary.csv",
        ["group", "time", "parameter", "mean", "sd", "cv", "n"],
        [[c.group, c.time, c.parameter, c.mean, c.sd, c.cv, c.n] for c in summary.cells],
    )
    writer.text("group_summary.txt", summary.render_text())

    if by_time:
        group_labels = np.array([GROUP_NAMES[g] for g in dataset.cow_group])
        time_labels = np.array(dataset.time)
        anova_rows = []
        csv_rows = []
        for j, parameter in enumerate(dataset.feature_names):
            column = dataset.features[:, j]
            keep = ~np.isnan(column)
            try:
                result = anova_twoway(column[keep], time_labels[keep], group_labels[keep])
            except (DegenerateDataError, MilkspecError):
                csv_rows.append([parameter, None, None, None])
                continue
            anova_rows.append((parameter, result))
            csv_rows.append(
                [parameter, result.factor_a.p_value, result.factor_b.p_value, result.interaction.p_value]
            )
        writer.csv("factor_anova.csv", ["parameter", "time_p", "group_p", "interaction_p"], csv_rows)
        if anova_rows:
            writer.text("factor_anova.txt", render_factor_table(anova_rows))


def _aligned_target(ctx: _RunContext, sample_ids: list[str], target: str, stage: str) -> np.ndarray:
    values = []
    for sample_id in sample_ids:
        panel = ctx.panel_by_id.get(sample_id)
        if panel is None:
            raise DataFormatError(f"{stage}: sample {sample_id!r} has no chemistry panel")
        if target == "cow_group":
            values.append(float(panel.cow_group))
        elif target == "time":
            values.append(0.0 if panel.time == "T0" else 1.0)
        else:
            try:
                values.append(panel.value(target))
            except KeyError:
                raise DataFormatError(f"{stage}: unknown target {target!r}") from None
    return np.array(values, dtype=float)


def _stage_correlate(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    options = config.correlate
    source = options.get("source", "spectra")
    target = options.get("target", "polyphenols")
    methods = options.get("methods", ["pearson", "kendall"])
    alpha = float(options.get("alpha", 0.05))
    correction = options.get("correction", "none")

    if source == "spectra":
        _require(ctx.spectra is not None, "correlate: no ROI spectra ingested")
        targets = _aligned_target(ctx, ctx.spectra_ids, target, "correlate")
        keep = ~np.isnan(targets)
        for method in methods:
            table = band_significance(
                ctx.spectra[keep],
                targets[keep],
                method=method,
                alpha=alpha,
                correction=correction,
                wavelengths=ctx.wavelengths,
            )
            writer.csv(
                f"band_significance_{method}.csv",
                ["band_index", "wavelength_nm", "coefficient", "p_value", "significant", "note"],
                [
                    [r.band_index, r.wavelength_nm, r.coefficient, r.p_value, int(r.significant), r.note]
                    for r in table
                ],
            )
    elif source == "image_features":
        _require(ctx.feature_matrix is not None, "correlate: no image features computed")
        targets = _aligned_target(ctx, ctx.feature_ids, target, "correlate")
        keep = ~np.isnan(targets)
        for method in methods:
            rows = []
            for j, name in enumerate(FEATURE_NAMES):
                try:
                    result = correlation(ctx.feature_matrix[keep, j], targets[keep], method)
                    rows.append([name, result.coefficient, result.p_value, int(result.p_value < alpha)])
                except DegenerateDataError:
                    rows.append([name, None, None, 0])
            writer.csv(
                f"feature_correlations_{method}.csv",
                ["feature", "coefficient", "p_value", "significant"],
                rows,
            )
    else:
        raise ConfigError(f"correlate: unknown source {source!r}")


def _feature_block(ctx: _RunContext, source: str, stage: str):
    """(sample_ids, column_names, matrix) for the selected feature source."""
    if source == "spectra":
        _require(ctx.spectra is not None, f"{stage}: no ROI spectra ingested")
        names = [f"band_{i}" for i in range(ctx.spectra.shape[1])]
        return list(ctx.spectra_ids), names, ctx.spectra
    if source == "image_features":
        _require(ctx.feature_matrix is not None, f"{stage}: no image features computed")
        return list(ctx.feature_ids), list(FEATURE_NAMES), ctx.feature_matrix
    if source == "fatty_acids":
        _require(ctx.panels is not None, f"{stage}: no chemistry panels ingested")
        names = [p for p in ctx.panels[0].parameters if p not in ("polyphenols", "frap")]
        matrix = np.array([[p.value(name) for name in names] for p in ctx.panels])
        return [p.sample_id for p in ctx.panels], names, matrix
    raise ConfigError(f"{stage}: unknown source {source!r}")


def _stage_pca(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    options = config.pca
    source = options.get("source", "fatty_acids")
    n_components = int(options.get("n_components", 2))
    sample_ids, names, matrix = _feature_block(ctx, source, "pca")

    keep = ~np.isnan(matrix).any(axis=1)
    matrix = matrix[keep]
    sample_ids = [sid for sid, k in zip(sample_ids, keep) if k]
    result = pca(matrix, n_components=n_components)

    writer.csv(
        "pca_explained.csv",
        ["component", "explained_variance_ratio"],
        [[f"PC{i + 1}", float(r)] for i, r in enumerate(result.explained_variance_ratio)],
    )
    writer.csv(
        "pca_scores.csv",
        ["sample_id", *[f"PC{i + 1}" for i in range(result.n_components)]],
        [[sid, *result.scores[i].tolist()] for i, sid in enumerate(sample_ids)],
    )
    if result.n_components >= 2 and ctx.panel_by_id:
        groups = np.array([ctx.panel_by_id[sid].cow_group if sid in ctx.panel_by_id else -1 for sid in sample_ids])
        label_names = {code: name for code, name in enumerate(GROUP_NAMES)}
        label_names[-1] = "unknown"
        svg = render_scatter_svg(result, groups, label_names, title="Fatty acid class distribution")
        writer.text("pca_scatter.svg", svg)


def _stage_regress(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    options = config.regress
    target = options.get("target", "polyphenols")
    source = options.get("source", "image_features")
    selected = options.get("features")
    sample_ids, names, matrix = _feature_block(ctx, source, "regress")
    if selected:
        missing = [f for f in selected if f not in names]
        if missing:
            raise ConfigError(f"regress: unknown feature(s) {', '.join(missing)}")
        columns = [names.index(f) for f in selected]
        matrix = matrix[:, columns]
        names = list(selected)

    y = _aligned_target(ctx, sample_ids, target, "regress")
    keep = ~(np.isnan(y) | np.isnan(matrix).any(axis=1))
    matrix, y = matrix[keep], y[keep]
    kept_ids = [sid for sid, k in zip(sample_ids, keep) if k]

    design = np.column_stack([np.ones(matrix.shape[0]), matrix])
    summary = ols_fit(design, y, names=["const", *names], dep_variable=f"{target}_mean")
    writer.text("ols_summary.txt", render_ols_text(summary))
    writer.json("ols_summary.json", ols_to_dict(summary))
    writer.csv(
        "ols_predictions.csv",
        ["sample_id", "actual", "fitted", "residual"],
        [
            [sid, float(y[i]), float(summary.fitted[i]), float(summary.residuals[i])]
            for i, sid in enumerate(kept_ids)
        ],
    )
    writer.text("qq_plot.svg", render_qq_svg(qq_points(summary.residuals)))


def _class_display(target: str, values: list):
    """Class values and display names; treatment groups render in
    alphabetical name order (ASIG, CTR, SIG)."""
    if target == "cow_group":
        pairs = sorted(((GROUP_NAMES[int(v)], v) for v in values))
        return [v for _, v in pairs], [n for n, _ in pairs]
    if target == "time":
        return sorted(values), ["T0" if v == 0 else "T12" for v in sorted(values)]
    return sorted(values), [f"class {int(v)}" for v in sorted(values)]


def _stage_classify(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    options = config.classify
    source = options.get("source", "spectra")
    target = options.get("target", "cow_group")
    sample_ids, _, matrix = _feature_block(ctx, source, "classify")

    y_raw = _aligned_target(ctx, sample_ids, target, "classify")
    keep = ~(np.isnan(y_raw) | np.isnan(matrix).any(axis=1))
    matrix, y_raw = matrix[keep], y_raw[keep]

    if target in ("cow_group", "time"):
        y = y_raw.astype(int)
    else:
        binning = options.get("binning", "median_split")
        if isinstance(binning, dict):
            y = discretize_target(y_raw, "quantile", k=int(binning["quantile"]))
        else:
            y = discretize_target(y_raw, binning)

    spec = ModelSpec.from_dict(options.get("model", {"kind": "forest"}))
    if spec.kind in ("forest", "linear_svm", "mlp") and "seed" not in spec.params:
        spec = spec.replace(seed=config.seed)
    split = SplitSpec(train_fraction=float(options.get("train_fraction", 0.8)), seed=config.seed)
    train_idx, test_idx = split_indices(matrix.shape[0], split)

    model = fit_model(spec, matrix[train_idx], y[train_idx])
    train_accuracy = float(np.mean(model.predict(matrix[train_idx]) == y[train_idx]))
    predictions = model.predict(matrix[test_idx])

    values, names = _class_display(target, sorted(set(y.tolist())))
    report = classification_report(y[test_idx], predictions, names, class_values=values)
    label = options.get("label", _MODEL_LABELS[spec.kind])
    writer.text("classification_report.txt", render_report_text(report, model_label=label))
    payload = report_to_dict(report)
    payload["train_accuracy"] = train_accuracy
    payload["model"] = {"kind": spec.kind, **spec.params}
    payload["n_train"] = int(train_idx.size)
    payload["n_test"] = int(test_idx.size)
    writer.json("classification_report.json", payload)
    writer.text("confusion_matrix.svg", render_confusion_svg(report))


def _pooled_pixels(ctx: _RunContext) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Stack every ROI's pixels; returns (pixels, noise_covariance, pixel ids)."""
    _require(bool(ctx.roi_blocks), "mnf_cluster: no cube ROIs ingested")
    blocks = []
    pixel_ids = []
    noise_estimates = []
    for sample_id in sorted(ctx.roi_blocks):
        block = ctx.roi_blocks[sample_id]
        blocks.append(block.reshape(-1, block.shape[2]))
        pixel_ids.extend([sample_id] * (block.shape[0] * block.shape[1]))
        noise_estimates.append(estimate_noise_covariance(block))
    pixels = np.vstack(blocks)
    noise = np.mean(noise_estimates, axis=0)
    return pixels, noise, pixel_ids


def _stage_mnf_cluster(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    options = config.mnf_cluster
    pixels, noise, pixel_ids = _pooled_pixels(ctx)
    bands = pixels.shape[1]
    mnf_components = int(options.get("mnf_components", min(10, bands)))
    pca_components = int(options.get("pca_components", min(3, mnf_components)))
    k = int(options.get("k", 3))

    result = spectral_cluster_pipeline(
        pixels[:, None, :],  # noise is pre-estimated per ROI, spatial layout unused
        mnf_components=mnf_components,
        pca_components=pca_components,
        k=k,
        seed=config.seed,
        noise_covariance=noise,
    )
    ctx.cluster_result = result
    ctx.pixel_sample_ids = pixel_ids

    writer.csv(
        "mnf_eigenvalues.csv",
        ["component", "snr_eigenvalue"],
        [[i + 1, float(v)] for i, v in enumerate(result.mnf.snr_eigenvalues)],
    )
    writer.csv(
        "cluster_assignments.csv",
        ["sample_id", "pixel_index", "cluster"],
        [
            [sample_id, i, int(cluster)]
            for i, (sample_id, cluster) in enumerate(zip(pixel_ids, result.clusters.assignments))
        ],
    )
    writer.json(
        "cluster_metrics.json",
        {
            "k": k,
            "mnf_components": mnf_components,
            "pca_components": pca_components,
            "inertia": result.clusters.inertia,
            "silhouette_mean": result.clusters.silhouette_mean,
            "n_iterations": result.clusters.n_iterations,
        },
    )


def _stage_cluster_validate(config: PipelineConfig, ctx: _RunContext, writer: _Writer):
    _require(ctx.cluster_result is not None, "cluster_validate: no clustering available")
    target = config.cluster_validate.get("auxiliary", "polyphenols")
    auxiliary = _aligned_target(ctx, ctx.pixel_sample_ids, target, "cluster_validate")
    keep = ~np.isnan(auxiliary)
    anova = cluster_validate(ctx.cluster_result.clusters.assignments[keep], auxiliary[keep])
    writer.json(
        "cluster_validation.json",
        {
            "auxiliary": target,
            "anova_p": anova.p_value,
            "f_statistic": None if math.isinf(anova.f_statistic) else anova.f_statistic,
            "df_between": anova.df_between,
            "df_within": anova.df_within,
            "degenerate": anova.degenerate,
        },
    )


_STAGE_FUNCTIONS = {
    "ingest": _stage_ingest,
    "features": _stage_features,
    "group_summary": _stage_group_summary,
    "correlate": _stage_correlate,
    "pca": _stage_pca,
    "regress": _stage_regress,
    "classify": _stage_classify,
    "mnf_cluster": _stage_mnf_cluster,
    "cluster_validate": _stage_cluster_validate,
}


def _stages_to_run(config: PipelineConfig) -> list[str]:
    needed = set(config.analyses)
    if "cluster_validate" in needed:
        needed.add("mnf_cluster")
    needs_features = any(
        getattr(config, stage).get("source") == "image_features"
        for stage in ("correlate", "pca", "regress", "classify")
        if stage in needed
    ) or (config.regress.get("source", "image_features") == "image_features" and "regress" in needed)
    if needs_features:
        needed.add("features")
    # a features-only selection has no use for cube/chemistry ingestion
    if needed - {"features"}:
        needed.add("ingest")
    return [s for s in _STAGE_ORDER if s in needed]


def _dependencies(stage: str, config: PipelineConfig) -> list[str]:
    if stage == "ingest" or stage == "features":
        return []
    deps = ["ingest"]
    uses_images = getattr(config, stage, {}) and getattr(config, stage).get("source") == "image_features"
    if stage == "regress" and config.regress.get("source", "image_features") == "image_features":
        uses_images = True
    if uses_images:
        deps.append("features")
    if stage == "cluster_validate":
        deps.append("mnf_cluster")
    return deps


def run_pipeline(config: PipelineConfig) -> ReportBundle:
    """Execute the selected analyses and write the report bundle.

    Identical (config, seed, inputs) produce byte-identical artifacts; the
    manifest records a content hash per artifact plus any stage diagnostics.
    """
    writer = _Writer(config.out_dir)
    ctx = _RunContext()
    diagnostics: list[dict] = []
    failed: set[str] = set()

    for stage in _stages_to_run(config):
        broken = [d for d in _dependencies(stage, config) if d in failed]
        if broken:
            diagnostics.append(
                {"stage": stage, "kind": "skipped", "error": f"dependency failed: {', '.join(broken)}"}
            )
            failed.add(stage)
            continue
        try:
            _STAGE_FUNCTIONS[stage](config, ctx, writer)
        except MilkspecError as exc:
            diagnostics.append(
                {"stage": stage, "kind": "failure", "error": str(exc), "error_class": type(exc).__name__}
            )
            failed.add(stage)

    manifest = {
        "tool": "milkspec",
        "version": __version__,
        "config_hash": hashlib.sha256(config.to_canonical_json().encode("utf-8")).hexdigest(),
        "seed": config.seed,
        "created": datetime.now(timezone.utc).isoformat(),
        "artifacts": writer.records,
        "diagnostics": diagnostics,
    }
    manifest_path = os.path.join(config.out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    artifacts = {record["name"]: os.path.join(config.out_dir, record["name"]) for record in writer.records}
    artifacts["manifest.json"] = manifest_path
    return ReportBundle(
        out_dir=config.out_dir,
        manifest=manifest,
        artifacts=artifacts,
        diagnostics=diagnostics,
    )
