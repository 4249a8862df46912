"""Campaign runner, post-hoc parameter-space study and design comparison tables."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import CampaignConfig
from .geometry import DegenerateGeometryError, DesignVector, GeometryContext
from .optimizers import IterationRecord, NumericalAbort, RunResult, build_context, build_evaluator, run
from .robust import sample_mean_variance
from .uncertainty import STUDY, RngStream, sample_batch

log = logging.getLogger(__name__)

HISTORY_COLUMNS = (
    "iteration",
    "normalized_cost",
    "mean_cd",
    "mean_cl",
    "objective",
    "g_lift_violation",
    "g_vol_violation",
    "alpha_deg",
)
STUDY_COLUMNS = ("design_id", "re_c", "model_id", "c_d", "c_l")
SUMMARY_COLUMNS = (
    "design_id",
    "label",
    "E_cd",
    "Var_cd",
    "CV_cd",
    "E_cl",
    "Var_cl",
    "CV_cl",
    "lift_margin",
    "flagged",
)
STAT_COLUMNS = SUMMARY_COLUMNS[2:8]


def fmt(x) -> str:
    """17 significant digits, so every written float parses back exactly."""
    if isinstance(x, (int, np.integer, str)):
        return str(x)
    return format(float(x), ".17g")


def history_row(record: IterationRecord) -> list[str]:
    return [
        fmt(record.k),
        fmt(record.normalized_cost),
        fmt(record.mean_cd),
        fmt(record.mean_cl),
        fmt(record.objective),
        fmt(record.g_lift_violation),
        fmt(record.g_vol_violation),
        fmt(record.alpha_deg),
    ]


def design_label(cfg: CampaignConfig) -> str:
    if cfg.mode == "dsp":
        return "dsp"
    return f"{cfg.mode}_n{cfg.n}_lambda{cfg.lam:g}"


def design_payload(design: DesignVector, cfg: CampaignConfig, ctx: GeometryContext) -> dict:
    return {
        "label": design_label(cfg),
        "mode": cfg.mode,
        "n": cfg.n,
        "lambda": cfg.lam,
        "seed": cfg.seed,
        "theta": design.theta.tolist(),
        "ffd_dy": design.ffd_dy.tolist(),
        "alpha_deg": design.alpha_deg,
        "geometry": ctx.settings(),
        "lattice": ctx.lattice.metadata(),
        "bounds": {"dy_max": cfg.dy_max, "alpha_min": cfg.alpha_min, "alpha_max": cfg.alpha_max},
    }


def load_design(path) -> tuple[DesignVector, dict]:
    """Parse a ``design.json`` back into a validated design vector."""
    meta = json.loads(Path(path).read_text())
    design = DesignVector.from_theta(meta["theta"])
    bounds = meta.get("bounds", {})
    design.validate(
        dy_max=bounds.get("dy_max", 0.05),
        alpha_bounds=(bounds.get("alpha_min", -5.0), bounds.get("alpha_max", 10.0)),
        n_free=len(meta["lattice"]["free_nodes"]),
    )
    return design, meta


@dataclass
class CampaignResult:
    out_dir: Path
    result: RunResult
    config: CampaignConfig


def run_campaign(cfg: CampaignConfig, workers: int = 1) -> CampaignResult:
    """Run one campaign and write config echo, history, final design and shape.

    ``history.csv`` is appended and flushed row by row. On a numerical abort
    ``diagnostics.json`` records the failing iteration before re-raising.
    """
    cfg = cfg.normalized()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.to_json_dict(), indent=2) + "\n")

    evaluator = build_evaluator(cfg, workers=workers)
    with open(out / "history.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HISTORY_COLUMNS)

        def on_record(record):
            writer.writerow(history_row(record))
            fh.flush()

        try:
            result = run(cfg, evaluator, on_record=on_record)
        except NumericalAbort as exc:
            (out / "diagnostics.json").write_text(
                json.dumps({"iteration": exc.iteration, "reason": exc.reason}, indent=2) + "\n"
            )
            raise

    payload = design_payload(result.design, cfg, evaluator.ctx)
    (out / "design.json").write_text(json.dumps(payload, indent=2) + "\n")
    evaluator.ctx.deform(result.design).to_dat(out / "shape.dat")
    log.info(
        "%s: %d iterations, %d evaluations, final alpha %.3f deg",
        payload["label"], len(result.records), result.n_evaluations, result.design.alpha_deg,
    )
    return CampaignResult(out, result, cfg)


@dataclass(frozen=True)
class StudyResult:
    design_id: int
    label: str
    E_cd: float
    Var_cd: float
    CV_cd: float
    E_cl: float
    Var_cl: float
    CV_cl: float
    lift_margin: float
    flagged: bool = False

    @classmethod
    def from_samples(cls, design_id: int, label: str, c_d, c_l) -> "StudyResult":
        e_cd, var_cd = sample_mean_variance(c_d)
        e_cl, var_cl = sample_mean_variance(c_l)
        return cls(
            design_id,
            label,
            e_cd,
            var_cd,
            _cv(e_cd, var_cd),
            e_cl,
            var_cl,
            _cv(e_cl, var_cl),
            e_cl - float(np.sqrt(var_cl)),
        )

    @classmethod
    def flagged_row(cls, design_id: int, label: str) -> "StudyResult":
        nan = float("nan")
        return cls(design_id, label, nan, nan, nan, nan, nan, nan, nan, True)

    @classmethod
    def from_row(cls, row: dict) -> "StudyResult":
        return cls(
            int(row["design_id"]),
            row["label"],
            *(float(row[c]) for c in STAT_COLUMNS),
            float(row["lift_margin"]),
            row["flagged"] in ("1", "True", "true"),
        )

    def row(self) -> list[str]:
        d = asdict(self)
        d["flagged"] = int(self.flagged)
        return [fmt(d[c]) for c in SUMMARY_COLUMNS]


def _cv(mean: float, var: float) -> float:
    std = np.sqrt(var)
    if std == 0.0:
        return 0.0
    return float(std / abs(mean))


def parameter_space_study(
    designs: Sequence[DesignVector],
    study_seed: int,
    m: int = 100,
    evaluator=None,
    labels: Sequence[str] | None = None,
    out_dir=None,
    re_bounds: tuple[float, float] = (1.0e6, 1.0e7),
    log_uniform_re: bool = False,
) -> list[StudyResult]:
    """Evaluate every design on one common set of ``m`` uncertain inputs.

    A design whose geometry is degenerate is flagged and its sample rows
    are written as NaN; the remaining designs are still reported.
    """
    if m < 2:
        raise ValueError(f"the study needs m >= 2 samples, got {m}")
    evaluator = evaluator or build_evaluator(CampaignConfig())
    labels = list(labels) if labels is not None else [f"design_{i}" for i in range(len(designs))]
    stream = RngStream(study_seed, purpose=STUDY, re_bounds=re_bounds, log_uniform_re=log_uniform_re)
    inputs = sample_batch(stream, 0, m)

    results, rows = [], []
    for i, design in enumerate(designs):
        try:
            _, responses = evaluator.evaluate_batch(design, inputs)
        except DegenerateGeometryError as exc:
            log.warning("design %d (%s) flagged: %s", i, labels[i], exc)
            results.append(StudyResult.flagged_row(i, labels[i]))
            rows.extend([i, xi.re_c, xi.model_id, float("nan"), float("nan")] for xi in inputs)
            continue
        c_d = [r.c_d for r in responses]
        c_l = [r.c_l for r in responses]
        results.append(StudyResult.from_samples(i, labels[i], c_d, c_l))
        rows.extend([i, xi.re_c, xi.model_id, cd, cl] for xi, cd, cl in zip(inputs, c_d, c_l))

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "study.csv", STUDY_COLUMNS, ([fmt(v) for v in row] for row in rows))
        write_csv(out / "summary.csv", SUMMARY_COLUMNS, (r.row() for r in results))
    return results


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_summary(path) -> list[StudyResult]:
    with open(path, newline="") as fh:
        return [StudyResult.from_row(row) for row in csv.DictReader(fh)]


COMPARISON_COLUMNS = ("label",) + STAT_COLUMNS + ("lift_margin",) + tuple(
    f"ratio_{c}" for c in STAT_COLUMNS
)


def compare_designs(results: Sequence[StudyResult], reference: str | int | None = None) -> list[dict]:
    """One row per strategy with the six statistics, lift margin and ratios.

    Ratios are taken against the row labelled ``dsp`` when present (or the
    row selected by ``reference``), otherwise against the first row.
    """
    if len(results) < 2:
        raise ValueError("comparison needs at least two study results")
    if isinstance(reference, int):
        ref = results[reference]
    else:
        key = reference or "dsp"
        ref = next((r for r in results if r.label == key), results[0])
    table = []
    for r in results:
        row = {"label": r.label}
        row.update({c: getattr(r, c) for c in STAT_COLUMNS})
        row["lift_margin"] = r.lift_margin
        for c in STAT_COLUMNS:
            denom = getattr(ref, c)
            row[f"ratio_{c}"] = getattr(r, c) / denom if denom != 0 else float("nan")
        table.append(row)
    return table


def format_table(table: Sequence[dict]) -> str:
    header = COMPARISON_COLUMNS
    cells = [[str(row["label"])] + [f"{row[c]:.3e}" for c in header[1:]] for row in table]
    widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


def write_comparison(table: Sequence[dict], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(
        out / "comparison.csv",
        COMPARISON_COLUMNS,
        ([row["label"]] + [fmt(row[c]) for c in COMPARISON_COLUMNS[1:]] for row in table),
    )
    (out / "comparison.txt").write_text(format_table(table) + "\n")
    return out / "comparison.csv"


def study_context(meta: dict) -> GeometryContext:
    """Geometry context matching the settings stored in a design file."""
    g = meta.get("geometry", {})
    return build_context(
        CampaignConfig(
            n_per_surface=g.get("n_per_surface", 200),
            nx=g.get("nx", 10),
            ny=g.get("ny", 2),
            margin_x=g.get("margin", [0.0, 0.02])[0],
            margin_y=g.get("margin", [0.0, 0.02])[1],
            n_quad=g.get("n_quad", 64),
        )
    )
