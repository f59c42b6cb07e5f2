"""Embedding artifact: the JSON interchange file consumed by the viewer.

Schema (format_version 1):

    meta: {format_version, n, m, m_prime, k, seed, metric,
           curve: {a, b, min_dist, spread}, gamma,
           schedule: {mode, sizes, epochs}, timestamps}
    eigenvalues: [lambda_1 ... lambda_S]           # non-trivial, ascending
    stages: [{s, epochs_used, full, p, y, response}]
        p: row-major s x m', y: row-major n x m', response: [||p_row||; s]
    explanation_head: {k, u_head (row-major n x K), response, glyph_ref_scale}
    labels: [int; n] | null
    metrics: per-stage report | null

All matrices are flat row-major float lists; floats survive a JSON
round-trip bit-exactly.  Writes are atomic (temp file + rename) so a
crashed run never leaves a half-readable artifact.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError

FORMAT_VERSION = 1
SIZE_WARN_BYTES = 200 * 1024 * 1024


def _as_flat(arr: np.ndarray) -> list[float]:
    return np.asarray(arr, dtype=np.float64).ravel(order="C").tolist()


def _from_flat(values, shape) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size != int(np.prod(shape)):
        raise FormatError(
            f"flat array holds {arr.size} values, expected shape {shape}"
        )
    return arr.reshape(shape)


@dataclass(frozen=True)
class StageEntry:
    s: int
    epochs_used: int
    p: np.ndarray         # (s, m')
    y: np.ndarray         # (n, m')
    response: np.ndarray  # (s,)
    full: bool = False


@dataclass(frozen=True)
class ExplanationHead:
    k: int
    u_head: np.ndarray    # (n, K) leading modes
    response: np.ndarray  # final-stage row norms, length s_final
    glyph_ref_scale: float


@dataclass(frozen=True)
class EmbeddingArtifact:
    meta: dict
    eigenvalues: np.ndarray
    stages: list[StageEntry]
    head: ExplanationHead
    labels: np.ndarray | None = None
    metrics: dict | None = None

    def __post_init__(self):
        if self.meta.get("format_version") != FORMAT_VERSION:
            raise ValidationError("meta.format_version must be "
                                  f"{FORMAT_VERSION}")
        sizes = [st.s for st in self.stages if not st.full]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValidationError("stage sizes must be strictly increasing")

    @property
    def final_stage(self) -> StageEntry:
        """The deliverable embedding: last progressive (non-full) stage."""
        for st in reversed(self.stages):
            if not st.full:
                return st
        return self.stages[-1]


def to_json_dict(art: EmbeddingArtifact) -> dict:
    n = int(art.meta["n"])
    m_prime = int(art.meta["m_prime"])
    return {
        "meta": art.meta,
        "eigenvalues": _as_flat(art.eigenvalues),
        "stages": [
            {
                "s": int(st.s),
                "epochs_used": int(st.epochs_used),
                "full": bool(st.full),
                "p": _as_flat(st.p),
                "y": _as_flat(st.y),
                "response": _as_flat(st.response),
            }
            for st in art.stages
        ],
        "explanation_head": {
            "k": int(art.head.k),
            "u_head": _as_flat(art.head.u_head),
            "response": _as_flat(art.head.response),
            "glyph_ref_scale": float(art.head.glyph_ref_scale),
        },
        "labels": None if art.labels is None
        else [int(v) for v in art.labels],
        "metrics": art.metrics,
        "_shapes": {"n": n, "m_prime": m_prime},
    }


def from_json_dict(doc: dict) -> EmbeddingArtifact:
    meta = doc.get("meta", {})
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(
            f"unsupported artifact format_version {version!r}; "
            f"this reader handles {FORMAT_VERSION}"
        )
    n = int(meta["n"])
    m_prime = int(meta["m_prime"])
    stages = []
    for raw in doc["stages"]:
        s = int(raw["s"])
        stages.append(StageEntry(
            s=s,
            epochs_used=int(raw["epochs_used"]),
            full=bool(raw.get("full", False)),
            p=_from_flat(raw["p"], (s, m_prime)),
            y=_from_flat(raw["y"], (n, m_prime)),
            response=_from_flat(raw["response"], (s,)),
        ))
    head_raw = doc["explanation_head"]
    k = int(head_raw["k"])
    resp = np.asarray(head_raw["response"], dtype=np.float64)
    head = ExplanationHead(
        k=k,
        u_head=_from_flat(head_raw["u_head"], (n, k)),
        response=resp,
        glyph_ref_scale=float(head_raw["glyph_ref_scale"]),
    )
    labels = doc.get("labels")
    return EmbeddingArtifact(
        meta=meta,
        eigenvalues=np.asarray(doc["eigenvalues"], dtype=np.float64),
        stages=stages,
        head=head,
        labels=None if labels is None else np.asarray(labels, dtype=np.int64),
        metrics=doc.get("metrics"),
    )


def save_artifact(path, art: EmbeddingArtifact) -> None:
    """Serialize to JSON and rename into place atomically."""
    payload = json.dumps(to_json_dict(art), indent=None,
                         separators=(",", ":")).encode()
    if len(payload) > SIZE_WARN_BYTES:
        warnings.warn(
            f"artifact is {len(payload) / 1e6:.0f} MB; consider fewer "
            "stages or a smaller dataset", stacklevel=2,
        )
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".",
                               prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_artifact(path) -> EmbeddingArtifact:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return from_json_dict(doc)
