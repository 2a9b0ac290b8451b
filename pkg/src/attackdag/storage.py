"""On-disk formats: corpus JSON, dag JSON, labels/annotations CSV, model JSON.

All writes are atomic (temp file, then rename) so a crash never leaves a
half-written artifact, and all serialization is deterministic (sorted keys,
fixed field order) so reruns produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .expr import ExpressionSyntaxError, line_col, parse_expression
from .graph import cdfg_from_expression, merge_cdfgs
from .learn.svm import SvmModel, SvmParams
from .model import (
    AttackDag,
    AttackRecord,
    BasicBlock,
    Cdfg,
    EmptyDescription,
    VulnerabilityCategory,
    expr_blocks,
    normalize_description,
)

EXPLOIT_BUCKETS = (
    "access_control",
    "crypto",
    "network",
    "malware",
    "bios_boot",
    "cache_poisoning",
)


class CorpusLoadError(ValueError):
    pass


class ExpressionParseFailure(CorpusLoadError):
    def __init__(self, message: str, attack: str, path: str, line: int, col: int):
        super().__init__(f"{path}:{line}:{col}: attack {attack!r}: {message}")
        self.attack = attack
        self.line = line
        self.col = col


class FingerprintMismatch(ValueError):
    pass


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def file_fingerprint(*paths: str | Path) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(Path(path).read_bytes())
        digest.update(b"\x00")
    return digest.hexdigest()


# --- corpus --------------------------------------------------------------------


@dataclass(frozen=True)
class Corpus:
    """A loaded attack corpus: records, interned blocks, and lookup maps."""

    records: tuple[AttackRecord, ...]
    blocks: tuple[BasicBlock, ...]
    category_map: Mapping[str, VulnerabilityCategory]
    socially_delivered: frozenset[str]
    bucket_map: Mapping[str, str]
    fingerprint: str
    path: str = ""

    def block_ids(self) -> dict[str, int]:
        return {b.norm_text: b.id for b in self.blocks}

    def blocks_by_id(self) -> dict[int, BasicBlock]:
        return {b.id: b for b in self.blocks}

    def record_cdfgs(self) -> list[tuple[str, Cdfg]]:
        ids = self.block_ids()

        def id_for(raw: str) -> int:
            return ids[normalize_description(raw)]

        return [(r.name, cdfg_from_expression(r.expression, id_for)) for r in self.records]

    def attack_dag(self) -> AttackDag:
        return merge_cdfgs(self.record_cdfgs())


def _locate_expression(raw_file: str, expression: str, offset: int) -> tuple[int, int]:
    """Best-effort (line, col) of an offset inside an expression within a file.

    The corpus stores each expression as a single JSON string; when the raw
    text appears verbatim (no JSON escaping needed) its file position is
    exact, otherwise we fall back to position within the expression alone.
    """
    at = raw_file.find(expression)
    if at < 0:
        line, col = line_col(expression, offset)
        return line, col
    line, col = line_col(raw_file, at + offset)
    return line, col


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    raw_file = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(raw_file)
    except json.JSONDecodeError as exc:
        raise CorpusLoadError(f"{path}: not valid JSON: {exc}") from exc
    attacks = payload.get("attacks")
    if not isinstance(attacks, list) or not attacks:
        raise CorpusLoadError(f"{path}: corpus has no attacks")

    raw_category_map = payload.get("category_map", {})
    category_map: dict[str, VulnerabilityCategory] = {}
    for label, value in raw_category_map.items():
        try:
            category_map[label] = VulnerabilityCategory(value)
        except ValueError:
            raise CorpusLoadError(
                f"{path}: category_map maps {label!r} to unknown class {value!r}"
            ) from None

    overrides_raw = payload.get("node_category_overrides", {})
    socially = payload.get("socially_delivered", [])
    bucket_map_raw = payload.get("bucket_map", {})

    records: list[AttackRecord] = []
    names: set[str] = set()
    for entry in attacks:
        name = entry.get("name", "")
        if not name:
            raise CorpusLoadError(f"{path}: attack without a name")
        if name in names:
            raise CorpusLoadError(f"{path}: duplicate attack name {name!r}")
        names.add(name)
        categories = tuple(entry.get("categories", ()))
        if not categories:
            raise CorpusLoadError(f"{path}: attack {name!r} has no categories")
        for label in categories:
            if label not in category_map:
                raise CorpusLoadError(
                    f"{path}: attack {name!r} uses unmapped category label {label!r}"
                )
        source_text = entry.get("expression", "")
        try:
            expression = parse_expression(source_text)
        except ExpressionSyntaxError as exc:
            line, col = _locate_expression(raw_file, source_text, exc.position)
            raise ExpressionParseFailure(str(exc), name, str(path), line, col) from exc
        records.append(
            AttackRecord(
                name=name,
                category_text=entry.get("category_text", ""),
                categories=categories,
                expression=expression,
                source=entry.get("source", ""),
            )
        )

    overrides: dict[str, VulnerabilityCategory] = {}
    for norm, value in overrides_raw.items():
        try:
            overrides[norm] = VulnerabilityCategory(value)
        except ValueError:
            raise CorpusLoadError(
                f"{path}: node_category_overrides maps {norm!r} to unknown class {value!r}"
            ) from None

    social_set = frozenset(socially)

    # Intern blocks in first-appearance order; a node's category comes from
    # an explicit override or else from the first category label of the
    # first attack mentioning it.
    blocks: list[BasicBlock] = []
    by_norm: dict[str, int] = {}
    for record in records:
        for leaf in expr_blocks(record.expression):
            try:
                norm = normalize_description(leaf.description)
            except EmptyDescription as exc:
                raise CorpusLoadError(f"{path}: attack {record.name!r}: {exc}") from exc
            if norm in by_norm:
                continue
            category = overrides.get(norm, category_map[record.categories[0]])
            by_norm[norm] = len(blocks)
            blocks.append(
                BasicBlock(
                    id=len(blocks),
                    raw_text=leaf.description.strip(),
                    norm_text=norm,
                    category=category,
                    socially_delivered=norm in social_set,
                )
            )

    for norm in sorted(social_set - set(by_norm)):
        raise CorpusLoadError(f"{path}: socially_delivered lists unknown node {norm!r}")
    for norm in sorted(set(overrides) - set(by_norm)):
        raise CorpusLoadError(f"{path}: node_category_overrides lists unknown node {norm!r}")

    bucket_map: dict[str, str] = {}
    for norm, bucket in bucket_map_raw.items():
        if bucket not in EXPLOIT_BUCKETS:
            raise CorpusLoadError(f"{path}: unknown exploit bucket {bucket!r} for {norm!r}")
        if norm not in by_norm:
            raise CorpusLoadError(f"{path}: bucket_map lists unknown node {norm!r}")
        bucket_map[norm] = bucket

    return Corpus(
        records=tuple(records),
        blocks=tuple(blocks),
        category_map=category_map,
        socially_delivered=social_set,
        bucket_map=bucket_map,
        fingerprint=hashlib.sha256(raw_file.encode("utf-8")).hexdigest(),
        path=str(path),
    )


# --- dag file --------------------------------------------------------------------


@dataclass(frozen=True)
class DagFile:
    dag: AttackDag
    blocks: dict[int, BasicBlock]
    buckets: dict[int, str]
    attrs_ref: Optional[str] = None


def dag_payload(
    dag: AttackDag,
    blocks: Mapping[int, BasicBlock],
    buckets: Mapping[int, str] | None = None,
    attrs_ref: Optional[str] = None,
) -> dict:
    nodes = []
    for node_id in sorted(dag.nodes):
        blk = blocks[node_id]
        entry = {
            "id": blk.id,
            "raw_text": blk.raw_text,
            "norm_text": blk.norm_text,
            "category": blk.category.value,
            "socially_delivered": blk.socially_delivered,
        }
        if buckets and node_id in buckets:
            entry["bucket"] = buckets[node_id]
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": [[u, v] for u, v in sorted(dag.edges)],
        "provenance": {
            f"{u}->{v}": sorted(dag.edge_provenance[(u, v)]) for u, v in sorted(dag.edges)
        },
        "attrs_ref": attrs_ref,
    }


def save_dag(path: str | Path, payload: dict) -> None:
    write_text_atomic(path, dump_json(payload))


def load_dag(path: str | Path) -> DagFile:
    from .graph import build_dag

    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    blocks: dict[int, BasicBlock] = {}
    buckets: dict[int, str] = {}
    for entry in payload["nodes"]:
        blk = BasicBlock(
            id=entry["id"],
            raw_text=entry["raw_text"],
            norm_text=entry["norm_text"],
            category=VulnerabilityCategory(entry["category"]),
            socially_delivered=entry.get("socially_delivered", False),
        )
        blocks[blk.id] = blk
        if "bucket" in entry:
            buckets[blk.id] = entry["bucket"]
    edges = [tuple(edge) for edge in payload["edges"]]
    provenance: dict[tuple[int, int], set[str]] = {}
    for key, namelist in payload.get("provenance", {}).items():
        u, v = key.split("->")
        provenance[(int(u), int(v))] = set(namelist)
    dag = build_dag(blocks.keys(), edges, provenance)
    return DagFile(dag=dag, blocks=blocks, buckets=buckets, attrs_ref=payload.get("attrs_ref"))


# --- labels / annotations ----------------------------------------------------------

LABELS_HEADER = ("origin", "dest", "label")
ANNOTATIONS_HEADER = ("origin", "dest", "verdict", "annotator", "note")


def load_labels(path: str | Path) -> list[tuple[int, int, int]]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != LABELS_HEADER:
        raise ValueError(f"{path}: bad labels header: {header!r}")
    out: list[tuple[int, int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        origin, dest, label = int(row[0]), int(row[1]), int(row[2])
        if label not in (1, -1):
            raise ValueError(f"{path}:{lineno}: label must be 1 or -1")
        if (origin, dest) in seen:
            raise ValueError(f"{path}:{lineno}: duplicate pair ({origin}, {dest})")
        seen.add((origin, dest))
        out.append((origin, dest, label))
    return out


def save_labels(path: str | Path, rows: Iterable[tuple[int, int, int]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LABELS_HEADER)
    for origin, dest, label in rows:
        writer.writerow([origin, dest, label])
    write_text_atomic(path, buf.getvalue())


def append_annotation(
    path: str | Path, origin: int, dest: int, verdict: str, annotator: str, note: str = ""
) -> None:
    """Append one verdict row; the annotation log is never rewritten."""
    if verdict not in ("feasible", "infeasible"):
        raise ValueError(f"verdict must be feasible or infeasible, got {verdict!r}")
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(ANNOTATIONS_HEADER)
        writer.writerow([origin, dest, verdict, annotator, note])


def load_annotations(path: str | Path) -> list[tuple[int, int, str, str, str]]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != ANNOTATIONS_HEADER:
        raise ValueError(f"{path}: bad annotations header: {header!r}")
    out = []
    for row in reader:
        if not row:
            continue
        out.append((int(row[0]), int(row[1]), row[2], row[3], row[4]))
    return out


# --- model ---------------------------------------------------------------------------


def save_model(path: str | Path, model: SvmModel, fingerprint: str) -> None:
    payload = {
        "params": {
            "c": model.params.c,
            "kernel": model.params.kernel,
            "gamma": model.params.gamma,
            "tolerance": model.params.tolerance,
            "shrinking": model.params.shrinking,
            "max_passes": model.params.max_passes,
            "seed": model.params.seed,
        },
        "support_vectors": model.support_vectors.tolist(),
        "dual_coefs": model.dual_coefs.tolist(),
        "bias": model.bias,
        "sv_indices": list(model.sv_indices),
        "sv_alphas": model.sv_alphas.tolist(),
        "sv_labels": model.sv_labels.tolist(),
        "n_samples": model.n_samples,
        "converged": model.converged,
        "corpus_fingerprint": fingerprint,
    }
    write_text_atomic(path, dump_json(payload))


def load_model(
    path: str | Path, expected_fingerprint: Optional[str] = None, force: bool = False
) -> SvmModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    stored = payload.get("corpus_fingerprint", "")
    if expected_fingerprint is not None and stored != expected_fingerprint and not force:
        raise FingerprintMismatch(
            f"{path}: model was trained on corpus {stored[:12]}..., "
            f"inputs hash to {expected_fingerprint[:12]}... (use --force to override)"
        )
    params = SvmParams(**payload["params"])
    return SvmModel(
        params=params,
        support_vectors=np.asarray(payload["support_vectors"], dtype=float),
        dual_coefs=np.asarray(payload["dual_coefs"], dtype=float),
        bias=float(payload["bias"]),
        sv_indices=tuple(payload["sv_indices"]),
        sv_alphas=np.asarray(payload["sv_alphas"], dtype=float),
        sv_labels=np.asarray(payload["sv_labels"], dtype=float),
        n_samples=int(payload["n_samples"]),
        converged=bool(payload["converged"]),
        fingerprint=stored,
    )


# --- predictions -----------------------------------------------------------------------

PREDICTIONS_HEADER = ("origin", "dest", "label", "decision")


def save_predictions(path: str | Path, rows: Iterable[tuple[int, int, int, float]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICTIONS_HEADER)
    for origin, dest, label, decision in rows:
        writer.writerow([origin, dest, label, repr(float(decision))])
    write_text_atomic(path, buf.getvalue())


def load_predictions(path: str | Path) -> list[tuple[int, int, int, float]]:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != PREDICTIONS_HEADER:
        raise ValueError(f"{path}: bad predictions header: {header!r}")
    return [(int(r[0]), int(r[1]), int(r[2]), float(r[3])) for r in reader if r]
