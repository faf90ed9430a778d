"""Batch runner producing on-disk artifacts for a configured experiment.

One call simulates ``runs`` independent trajectories under per-run
substreams of the master seed and writes, into a single output directory:

* ``run_NNNN.csv`` (or ``.json``) — per-run trajectory table with columns
  ``step, V, err_norm_1..N, est_norm_1..N``, thinned to every
  ``record_every``-th step (the final step is always included);
* ``aggregate.csv`` (or ``.json``) — across-run means at the same steps:
  ``step, mean_V, regret_1..N, mar``.  Regret columns are cumulative
  excess losses averaged over runs and computed at full resolution before
  thinning; ``mar`` is the max-over-nodes regret normalized by
  ``t^(1-tau) ln t`` with ``tau`` taken from the innovation-gain exponent
  (``nan`` below step 2);
* ``excitation.json`` — the windowed excitation diagnostic;
* ``config.txt`` — the canonical rendering of the resolved configuration;
* ``manifest.json`` — seed, config digest, library versions, bound-check
  totals, and a SHA-256 digest of every other artifact.  No timestamps:
  rerunning the same configuration on the same library versions
  reproduces every file byte for byte.

CSV cells use ``%.17g`` (exact float round-trip) and LF newlines.  JSON
files are two-space indented with sorted keys; numbers use Python's
shortest round-trip representation.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, render_config
from .errors import InvalidInputError
from .estimator import run_trajectory, substream
from .excitation import ExcitationReport, pe_diagnostic

__all__ = ["ExperimentArtifacts", "run_experiment", "default_out_dir"]

_SCHEMA = 1
# Cap on excitation windows serialized into the artifact; keeps the JSON
# a few hundred KB even for very long horizons.
_AUDIT_WINDOW_CAP = 2000

OUT_DIR_ENV = "NETLMS_OUT"


@dataclass(frozen=True)
class ExperimentArtifacts:
    """Paths written by :func:`run_experiment`, plus the in-memory
    aggregate table (column name -> vector) and excitation report."""

    out_dir: str
    run_files: tuple[str, ...]
    aggregate_file: str
    excitation_file: str
    config_file: str
    manifest_file: str
    aggregate: dict[str, np.ndarray]
    excitation: ExcitationReport


def default_out_dir(config: ExperimentConfig) -> str:
    """Output directory resolution: the config's ``out`` field, else the
    ``NETLMS_OUT`` environment variable, else ``./netlms-out/<name>``."""
    if config.out:
        return config.out
    env = os.environ.get(OUT_DIR_ENV, "")
    base = env if env else os.path.join(".", "netlms-out")
    return os.path.join(base, config.name)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_table(path: str, fmt: str, columns: list[str], rows: np.ndarray) -> None:
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        data = "\n".join(lines) + "\n"
        with open(path, "w", newline="") as fh:
            fh.write(data)
    else:
        payload = {
            "schema": _SCHEMA,
            "columns": columns,
            # Strict JSON: non-finite cells (the sub-2-step mar entries)
            # become null rather than a NaN literal.
            "rows": [[float(v) if np.isfinite(v) else None for v in row] for row in rows],
        }
        _write_json(path, payload)


def _write_json(path: str, payload) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2, allow_nan=False))
        fh.write("\n")


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        # JSON has no Infinity/NaN literals that survive strict parsers.
        return "nan" if obj != obj else ("inf" if obj > 0 else "-inf")
    return obj


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _record_indices(rows: int, every: int) -> np.ndarray:
    idx = np.arange(0, rows, every)
    if idx[-1] != rows - 1:
        idx = np.append(idx, rows - 1)
    return idx


def _run_one(args) -> tuple[np.ndarray, np.ndarray, tuple[int, int, int]]:
    """Worker: simulate one run and reduce it to the artifact-sized pieces.

    Returns the thinned trajectory table, the regret contribution
    (cumulative excess losses sampled at the recorded steps), and the
    bound-check tallies ``(steps, w_violations, m_violations)``.
    """
    config, index, idx = args
    rec = run_trajectory(config, substream(config.seed, index))
    table = np.column_stack([idx.astype(float), rec.v[idx], rec.err_norms[idx], rec.est_norms[idx]])
    regret = np.cumsum(rec.excess_losses, axis=0)[idx]
    br = rec.bound_report
    return table, regret, (br.steps_checked, br.w_violations, br.m_violations)


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | None = None,
    fmt: str = "csv",
    workers: int = 1,
) -> ExperimentArtifacts:
    """Run the configured batch and write all artifacts.

    ``fmt`` selects ``csv`` or ``json`` for the tabular artifacts (the
    excitation report and manifest are always JSON).  ``workers > 1``
    distributes runs across processes; results and files are identical
    either way because every run consumes its own seed substream.
    """
    if fmt not in ("csv", "json"):
        raise InvalidInputError(f"fmt must be 'csv' or 'json', got {fmt!r}")
    if workers < 1:
        raise InvalidInputError("workers must be positive")
    config.validate()

    out = default_out_dir(config) if out_dir is None else out_dir
    os.makedirs(out, exist_ok=True)

    rows = config.horizon + 1
    idx = _record_indices(rows, config.record_every)
    jobs = [(config, i, idx) for i in range(config.runs)]
    if workers == 1:
        results = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))

    n = config.nodes
    run_cols = ["step", "V"] + [f"err_norm_{i + 1}" for i in range(n)] + [
        f"est_norm_{i + 1}" for i in range(n)
    ]
    ext = "csv" if fmt == "csv" else "json"
    run_files = []
    mean_v = np.zeros(idx.size)
    mean_regret = np.zeros((idx.size, n))
    checked = w_bad = m_bad = 0
    for i, (table, regret, tallies) in enumerate(results):
        path = os.path.join(out, f"run_{i:04d}.{ext}")
        _write_table(path, fmt, run_cols, table)
        run_files.append(path)
        mean_v += (table[:, 1] - mean_v) / (i + 1)
        mean_regret += (regret - mean_regret) / (i + 1)
        checked += tallies[0]
        w_bad += tallies[1]
        m_bad += tallies[2]

    tau = config.gains.a_exp
    steps = idx.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        norm = steps ** (1.0 - tau) * np.log(steps)
        mar = np.where(idx >= 2, mean_regret.max(axis=1) / np.where(idx >= 2, norm, 1.0), np.nan)
    agg_cols = ["step", "mean_V"] + [f"regret_{i + 1}" for i in range(n)] + ["mar"]
    agg_rows = np.column_stack([steps, mean_v, mean_regret, mar])
    aggregate_file = os.path.join(out, f"aggregate.{ext}")
    _write_table(aggregate_file, fmt, agg_cols, agg_rows)

    total_windows = max(1, rows // max(1, config.excitation.window))
    report = pe_diagnostic(config, windows=min(total_windows, _AUDIT_WINDOW_CAP))
    excitation_file = os.path.join(out, "excitation.json")
    _write_json(excitation_file, {"schema": _SCHEMA, "report": _jsonable(report)})

    config_text = render_config(config)
    config_file = os.path.join(out, "config.txt")
    with open(config_file, "w", newline="") as fh:
        fh.write(config_text)

    manifest = {
        "schema": _SCHEMA,
        "name": config.name,
        "seed": config.seed,
        "runs": config.runs,
        "horizon": config.horizon,
        "record_every": config.record_every,
        "format": fmt,
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "versions": {
            "netlms": _package_version(),
            "numpy": np.__version__,
            "python": ".".join(map(str, __import__("sys").version_info[:3])),
        },
        "bound_checks": {"steps": checked, "w_violations": w_bad, "m_violations": m_bad},
        "files": {
            os.path.basename(p): _sha256(p)
            for p in [*run_files, aggregate_file, excitation_file, config_file]
        },
    }
    manifest_file = os.path.join(out, "manifest.json")
    _write_json(manifest_file, manifest)

    aggregate = {name: agg_rows[:, j].copy() for j, name in enumerate(agg_cols)}
    return ExperimentArtifacts(
        out_dir=out,
        run_files=tuple(run_files),
        aggregate_file=aggregate_file,
        excitation_file=excitation_file,
        config_file=config_file,
        manifest_file=manifest_file,
        aggregate=aggregate,
        excitation=report,
    )


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("netlms")
    except Exception:
        return "unknown"
