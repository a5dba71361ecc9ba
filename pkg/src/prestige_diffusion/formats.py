"""File formats shared by the command-line tools.

CSV files carry a header row; floats are written with 6 significant digits
and missing values as empty fields.  JSON is written with sorted keys.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .epidemic import CellSummary, SweepResult
from .graph import InvariantError, LoadError
from .prestige import PrestigeScores

SWEEP_COLUMNS = ["node", "p", "q", "mean_size_frac", "mean_length", "mean_length_norm",
                 "trials", "sd_size_frac", "sd_length"]


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.6g}"


def _json_value(x):
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if math.isnan(x) else float(f"{x:.6g}")
    return x


def dumps_json(obj) -> str:
    return json.dumps(_json_value(obj), sort_keys=True, indent=2) + "\n"


def write_csv(rows, header, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (inclusive of b) or a comma list of values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} is not a:b:step")
        a, b, step = (float(s) for s in parts)
        if a == b:
            return [a]
        if step <= 0 or b < a:
            raise ValueError(f"grid {text!r} needs a <= b and step > 0")
        n = int(math.floor((b - a) / step + 1e-9))
        return [round(a + i * step, 12) for i in range(n + 1)]
    return [float(s) for s in text.split(",") if s.strip()]


def sweep_rows(result: SweepResult):
    for r in result.rows:
        yield [r.node, r.p, r.q, r.mean_size_frac, r.mean_length, r.mean_length_norm,
               r.trials, r.sd_size_frac, r.sd_length]


def write_sweep(result: SweepResult, out):
    write_csv(sweep_rows(result), SWEEP_COLUMNS, out)


def _opt_float(s):
    return None if s == "" else float(s)


def read_sweep(text, n_nodes, source="<sweep>") -> SweepResult:
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.DictReader(text)
    missing = set(SWEEP_COLUMNS[:7]) - set(reader.fieldnames or [])
    if missing:
        raise LoadError(f"sweep CSV lacks columns {sorted(missing)}", source, 1)
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            rows.append(CellSummary(
                node=int(rec["node"]), p=float(rec["p"]), q=float(rec["q"]),
                trials=int(rec["trials"]), mean_size_frac=float(rec["mean_size_frac"]),
                mean_length=float(rec["mean_length"]),
                mean_length_norm=_opt_float(rec["mean_length_norm"]),
                sd_size_frac=_opt_float(rec.get("sd_size_frac", "") or ""),
                sd_length=_opt_float(rec.get("sd_length", "") or ""),
                mean_jumps=None,
            ))
        except (ValueError, TypeError) as exc:
            raise LoadError(f"malformed sweep row ({exc})", source, lineno) from None
        y = rows[-1].mean_size_frac
        if n_nodes and not (1 / n_nodes - 1e-6 <= y <= 1 + 1e-9):
            raise InvariantError(f"{source}:{lineno}: mean_size_frac {y} outside [1/N, 1]")
    return SweepResult(n_nodes, tuple(rows))


PRESTIGE_COLUMNS = ["id", "label", "mean_rank", "best_violations", "samples_used"]


def write_prestige(labels, scores: PrestigeScores, out):
    rows = ([i, lab, scores.mean_rank[i], scores.best_violations, scores.samples_used]
            for i, lab in enumerate(labels))
    write_csv(rows, PRESTIGE_COLUMNS, out)


def read_prestige(text, source="<prestige>") -> PrestigeScores:
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.DictReader(text)
    if not {"id", "mean_rank"} <= set(reader.fieldnames or []):
        raise LoadError("prestige CSV needs id and mean_rank columns", source, 1)
    ranks = {}
    samples = 0
    best = None
    for lineno, rec in enumerate(reader, start=2):
        try:
            ranks[int(rec["id"])] = float(rec["mean_rank"])
            samples = int(rec.get("samples_used") or 0)
            bv = rec.get("best_violations")
            best = int(bv) if bv else None
        except ValueError as exc:
            raise LoadError(f"malformed prestige row ({exc})", source, lineno) from None
    n = len(ranks)
    if sorted(ranks) != list(range(n)):
        raise LoadError("prestige ids must be exactly 0..N-1", source)
    scores = PrestigeScores(np.array([ranks[i] for i in range(n)]), samples, best)
    return scores.check(require_permutation_sum=False)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to reproduce one command's output byte for byte."""

    command: str
    params: dict
    inputs: dict = field(default_factory=dict)
    master_seed: int | None = None
    version: str = __version__

    @classmethod
    def build(cls, command, params, input_paths, master_seed=None):
        inputs = {str(k): sha256_file(p) for k, p in sorted(input_paths.items()) if p}
        return cls(command, dict(sorted(params.items())), inputs, master_seed)

    def dumps(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    def write_beside(self, out_path):
        Path(str(out_path) + ".manifest.json").write_text(self.dumps(), encoding="utf-8")
