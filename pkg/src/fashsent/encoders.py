"""Word-embedding providers and the per-record text / attribute / vision encodings."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .data import ATTRIBUTE_CLASSES, ATTRIBUTE_SLOT, VISION_DIM, Attribute, PostRecord, filter_attributes

MAX_REGIONS = 8
SUB_DIM = 300
N_TABLES = 3


class EncodingError(ValueError):
    pass


def synthetic_embedding(token: str, dim: int, seed: int = 0) -> np.ndarray:
    """Unit-norm Gaussian vector seeded by a hash of (seed, token)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=16, key=str(seed).encode()).digest()
    rng = np.random.default_rng(int.from_bytes(h, "little"))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class EmbeddingProvider(Protocol):
    dim: int

    def vector(self, token: str) -> np.ndarray: ...


class SyntheticEmbeddings:
    """Three independent hash-seeded sub-tables concatenated (no stored vocabulary)."""

    def __init__(self, sub_dim: int = SUB_DIM, seed: int = 0, n_tables: int = N_TABLES):
        self.sub_dim = sub_dim
        self.seed = seed
        self.n_tables = n_tables
        self.dim = sub_dim * n_tables
        self._cache: dict[str, np.ndarray] = {}

    def vector(self, token: str) -> np.ndarray:
        v = self._cache.get(token)
        if v is None:
            v = np.concatenate([synthetic_embedding(token, self.sub_dim, self.seed * 31 + k)
                                for k in range(self.n_tables)])
            self._cache[token] = v
        return v


def read_table(path) -> tuple[int, dict[str, np.ndarray]]:
    """Read an embedding table: header ``dim N`` then ``token v1 ... vN`` per line."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "dim" or not header[1].isdigit():
            raise EncodingError(f"{path}:1: expected header 'dim N'")
        dim = int(header[1])
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if not line.strip():
                continue
            if len(parts) != dim + 1:
                raise EncodingError(f"{path}:{lineno}: expected token plus {dim} values, got {len(parts) - 1}")
            try:
                table[parts[0]] = np.array(parts[1:], dtype=np.float64)
            except ValueError:
                raise EncodingError(f"{path}:{lineno}: non-numeric value") from None
    return dim, table


def write_table(path, table: dict[str, np.ndarray]) -> None:
    dims = {len(v) for v in table.values()}
    if len(dims) != 1:
        raise EncodingError("all vectors in a table must share one width")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim {dims.pop()}\n")
        for tok, v in table.items():
            fh.write(tok + " " + " ".join(repr(float(x)) for x in v) + "\n")


class TableEmbeddings:
    """File-backed sub-tables; a token missing from a sub-table gets that
    table's synthetic fallback vector."""

    def __init__(self, tables: Sequence[tuple[int, dict[str, np.ndarray]]], seed: int = 0):
        self.dims = [dim for dim, _ in tables]
        self.tables = [table for _, table in tables]
        self.seed = seed
        self.dim = sum(self.dims)
        self.paths: list | None = None

    @classmethod
    def from_files(cls, paths, seed: int = 0) -> "TableEmbeddings":
        paths = list(paths)
        provider = cls([read_table(p) for p in paths], seed)
        provider.paths = paths
        return provider

    def vector(self, token: str) -> np.ndarray:
        parts = []
        for k, (table, dim) in enumerate(zip(self.tables, self.dims)):
            v = table.get(token)
            parts.append(v if v is not None else synthetic_embedding(token, dim, self.seed * 31 + k))
        return np.concatenate(parts)


# ---------------------------------------------------------------- encodings


@dataclass
class TextEncoding:
    matrix: np.ndarray  # [l_t x d]
    mask: np.ndarray    # [l_t] bool


@dataclass
class AttributeEncoding:
    matrix: np.ndarray  # [20 x d]
    mask: np.ndarray    # [20] bool


@dataclass
class VisionEncoding:
    global_vec: np.ndarray  # [512]
    regions: np.ndarray     # [MAX_REGIONS x 512], row 0 is the global feature
    mask: np.ndarray        # [MAX_REGIONS] bool
    roles: list[str]


def embed_text(tokens: Sequence[str], provider: EmbeddingProvider) -> TextEncoding:
    if not tokens:
        return TextEncoding(np.zeros((0, provider.dim)), np.zeros(0, dtype=bool))
    return TextEncoding(np.stack([provider.vector(t) for t in tokens]), np.ones(len(tokens), dtype=bool))


def embed_attributes(attrs: Sequence[Attribute], provider: EmbeddingProvider) -> AttributeEncoding:
    matrix = np.zeros((len(ATTRIBUTE_CLASSES), provider.dim))
    mask = np.zeros(len(ATTRIBUTE_CLASSES), dtype=bool)
    for a in attrs:
        slot = ATTRIBUTE_SLOT[a.cls]
        if mask[slot]:
            continue
        words = a.value.lower().split()
        if not words:
            continue
        matrix[slot] = np.mean([provider.vector(w) for w in words], axis=0)
        mask[slot] = True
    return AttributeEncoding(matrix, mask)


def encode_vision(record: PostRecord, vision_dim: int = VISION_DIM, max_regions: int = MAX_REGIONS) -> VisionEncoding:
    g = record.global_region()
    if g is None:
        raise EncodingError(f"record {record.id}: missing field 'regions' entry with role 'global'")
    for r in record.regions:
        if r.vec.shape != (vision_dim,):
            raise EncodingError(f"record {record.id}: region width {r.vec.shape[0]} != {vision_dim}")
    chosen = [g]
    chosen += [r for r in record.regions if r.role == "face"]
    chosen += [r for r in record.regions if r.role == "item"]
    chosen = chosen[:max_regions]
    regions = np.zeros((max_regions, vision_dim))
    mask = np.zeros(max_regions, dtype=bool)
    for i, r in enumerate(chosen):
        regions[i] = r.vec
        mask[i] = True
    return VisionEncoding(g.vec.copy(), regions, mask, [r.role for r in chosen])


@dataclass
class EncodedPost:
    id: str
    text: TextEncoding
    attrs: AttributeEncoding
    vision: VisionEncoding
    label: int | None


def encode_record(record: PostRecord, provider: EmbeddingProvider, vision_dim: int = VISION_DIM) -> EncodedPost:
    return EncodedPost(
        id=record.id,
        text=embed_text(record.tokens, provider),
        attrs=embed_attributes(filter_attributes(record.attributes), provider),
        vision=encode_vision(record, vision_dim),
        label=record.label,
    )


def provider_spec(provider) -> dict:
    """JSON-able description from which ``provider_from_spec`` rebuilds ``provider``."""
    if isinstance(provider, SyntheticEmbeddings):
        return {"type": "synthetic", "sub_dim": provider.sub_dim, "n_tables": provider.n_tables,
                "seed": provider.seed}
    if isinstance(provider, TableEmbeddings):
        paths = provider.paths
        if paths is None:
            raise EncodingError("in-memory embedding tables cannot be described; load them with from_files")
        return {"type": "file", "paths": [str(p) for p in paths], "seed": provider.seed}
    raise EncodingError(f"unknown embedding provider {type(provider).__name__}")


def provider_from_spec(spec: dict):
    if spec["type"] == "synthetic":
        return SyntheticEmbeddings(spec["sub_dim"], spec["seed"], spec.get("n_tables", N_TABLES))
    if spec["type"] == "file":
        return TableEmbeddings.from_files(spec["paths"], spec["seed"])
    raise EncodingError(f"unknown embedding provider type {spec['type']!r}")
