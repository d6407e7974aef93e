"""Asset catalog: lookup by description and size normalization."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Aabb, Euler, Layout, Vec3

# raw asset geometry defaults to a unit box resting on the ground plane
UNIT_BOX = Aabb(Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 1.0))


class EmptyCatalog(ValueError):
    pass


class DegenerateExtent(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str = ""
    height_m: float = 1.0
    base_bbox: Aabb = field(default=UNIT_BOX)
    file: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.height_m) and self.height_m > 0.0):
            raise ValueError(f"height_m must be positive, got "
                             f"{self.height_m!r}")


def load_catalog(path: str | Path) -> tuple[CatalogEntry, ...]:
    """Read a catalog JSON file: either a list of entries or an object
    with an "entries" array. Repeated names get -2, -3, ... suffixes."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("entries", [])
    if not isinstance(data, list) or not data:
        raise EmptyCatalog(str(path))
    entries = []
    seen: dict[str, int] = {}
    for raw in data:
        name = str(raw.get("name", "")).strip()
        if not name:
            raise EmptyCatalog(f"unnamed entry in {path}")
        seen[name] = seen.get(name, 0) + 1
        if seen[name] > 1:
            name = f"{name}-{seen[name]}"
        bbox = UNIT_BOX
        if "base_bbox" in raw:
            b = raw["base_bbox"]
            bbox = Aabb(Vec3(*[float(v) for v in b["min"]]),
                        Vec3(*[float(v) for v in b["max"]]))
        entries.append(CatalogEntry(
            name=name,
            description=str(raw.get("description", "")),
            height_m=float(raw.get("height_m", 1.0)),
            base_bbox=bbox,
            file=raw.get("file")))
    return tuple(entries)


def tokenize(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.lower())


def retrieve(catalog: tuple[CatalogEntry, ...], query: str,
             k: int = 1) -> list[CatalogEntry]:
    """Rank entries against the query with IDF-weighted cosine over name
    and description tokens. Ties break toward the smaller name."""
    if not catalog:
        raise EmptyCatalog("retrieve on empty catalog")
    docs = [tokenize(e.name) + tokenize(e.description) for e in catalog]
    n = len(docs)
    df: dict[str, int] = {}
    for tokens in docs:
        for tok in set(tokens):
            df[tok] = df.get(tok, 0) + 1

    def idf(tok: str) -> float:
        return math.log((n + 1) / (df.get(tok, 0) + 1)) + 1.0

    def weights(tokens: list[str]) -> dict[str, float]:
        counts: dict[str, float] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0.0) + 1.0
        return {tok: tf * idf(tok) for tok, tf in counts.items()}

    qw = weights(tokenize(query))
    qn = math.sqrt(sum(v * v for v in qw.values()))
    scored = []
    for entry, tokens in zip(catalog, docs):
        dw = weights(tokens)
        dn = math.sqrt(sum(v * v for v in dw.values()))
        dot = sum(qw.get(tok, 0.0) * w for tok, w in dw.items())
        score = dot / (qn * dn) if qn > 0 and dn > 0 else 0.0
        scored.append((score, entry))
    scored.sort(key=lambda item: (-item[0], item[1].name))
    return [entry for _, entry in scored[:k]]


def normalize_height(entry: CatalogEntry,
                     height_m: float | None = None) -> Layout:
    """Scale the raw box uniformly to the target height, centered on the
    origin with its bottom on the ground. height_m overrides the entry's
    own height when given."""
    target = entry.height_m if height_m is None else height_m
    ext = entry.base_bbox.extents()
    if not (ext.z > 0.0) or not math.isfinite(ext.z):
        raise DegenerateExtent(f"base z extent {ext.z!r}")
    if not (target > 0.0 and math.isfinite(target)):
        raise DegenerateExtent(f"target height {target!r}")
    s = target / ext.z
    half_x = ext.x * s / 2.0
    half_y = ext.y * s / 2.0
    box = Aabb(Vec3(-half_x, -half_y, 0.0),
               Vec3(half_x, half_y, target))
    return Layout(location=box.center(), bbox=box, orientation=Euler())


def default_layout(height_m: float = 1.0) -> Layout:
    return normalize_height(CatalogEntry(name="box", height_m=height_m))


def slug(name: str) -> str:
    parts = tokenize(name)
    return "-".join(parts) if parts else "asset"


def unique_ids(names: list[str]) -> list[str]:
    """Stable ids for possibly repeated asset names: chair, chair-2, ..."""
    counts: dict[str, int] = {}
    out = []
    for name in names:
        base = slug(name)
        counts[base] = counts.get(base, 0) + 1
        out.append(base if counts[base] == 1 else
                   f"{base}-{counts[base]}")
    return out
