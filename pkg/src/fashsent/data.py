"""Post records: cleaning, filtering, file I/O, splitting and synthetic data."""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .emoji_table import EMOJI_NAMES

LABELS = ("positive", "negative", "neutral")
LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}
ROLES = ("global", "face", "item")
VISION_DIM = 512
MAX_TOKENS = 64
MAX_HASHTAGS = 5
MIN_TOKENS = 5
ATTRIBUTE_THRESHOLD = 0.5

# canonical slot order for attribute encodings
ATTRIBUTE_CLASSES = (
    "category", "top_category", "subcategory", "layers", "style", "cut", "color",
    "pattern", "age", "material", "length", "neckline", "gender", "sleeves",
    "gemstones", "fit", "hood", "height", "embellishment", "type",
)
ATTRIBUTE_SLOT = {c: i for i, c in enumerate(ATTRIBUTE_CLASSES)}


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Region:
    role: str
    vec: np.ndarray


@dataclass(frozen=True)
class Attribute:
    cls: str
    value: str
    confidence: float


@dataclass
class PostRecord:
    id: str
    raw_text: str
    tokens: list[str]
    regions: list[Region] = field(default_factory=list)
    attributes: list[Attribute] = field(default_factory=list)
    label: int | None = None
    has_person: bool | None = None

    def global_region(self) -> Region | None:
        for r in self.regions:
            if r.role == "global":
                return r
        return None


@dataclass
class DatasetSplit:
    train: list[PostRecord]
    val: list[PostRecord]
    test: list[PostRecord]
    seed: int


def normalize_class(name: str) -> str:
    return re.sub(r"[\s\-]+", "_", name.strip().lower())


# ---------------------------------------------------------------- text cleaning

_SKIP = {0xFE0E, 0xFE0F, 0x200D, 0x20E3}


def _is_emoji(cp: int) -> bool:
    return (
        0x1F000 <= cp <= 0x1FAFF
        or 0x2600 <= cp <= 0x27BF
        or 0x2300 <= cp <= 0x23FF
        or 0x2B00 <= cp <= 0x2BFF
        or 0xE0020 <= cp <= 0xE007F
        or cp in _SKIP
    )


def replace_emoji(text: str) -> str:
    out = []
    for ch in text:
        name = EMOJI_NAMES.get(ch)
        if name is not None:
            out.append(f" {name} ")
        elif _is_emoji(ord(ch)):
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION = re.compile(r"@\w+")
_TOKEN = re.compile(r"#\w+|\w+|[^\w\s]")
_HASHTAG = re.compile(r"#\w+")
EMOJI_TOKENS = frozenset(EMOJI_NAMES.values())


def identity_translate(text: str) -> str:
    """Translation hook; texts are assumed to be English already."""
    return text


def clean_text(raw: str, translate: Callable[[str], str] = identity_translate) -> list[str]:
    text = replace_emoji(raw).lower()
    text = _URL.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = translate(text)
    tokens = []
    n_tags = 0
    for tok in _TOKEN.findall(text):
        if _HASHTAG.fullmatch(tok):
            n_tags += 1
            if n_tags > MAX_HASHTAGS:
                continue
        tokens.append(tok)
    return tokens[:MAX_TOKENS]


# ---------------------------------------------------------------- filtering


def fingerprint(record: PostRecord) -> int | None:
    g = record.global_region()
    if g is None:
        return None
    rounded = np.round(np.asarray(g.vec, dtype=np.float64), 6) + 0.0  # folds -0.0 into 0.0
    return int.from_bytes(hashlib.blake2b(rounded.tobytes(), digest_size=8).digest(), "little")


def filter_post(record: PostRecord, seen: set[int]) -> str | None:
    """Return None to keep ``record`` or the drop reason.  Kept fingerprints go into ``seen``."""
    if len(record.tokens) < MIN_TOKENS:
        return "too_short"
    if all(t in EMOJI_TOKENS for t in record.tokens):
        return "emoji_only"
    if record.has_person is False:
        return "no_person"
    fp = fingerprint(record)
    if fp is not None:
        if fp in seen:
            return "duplicate"
        seen.add(fp)
    return None


def filter_posts(records: Iterable[PostRecord]) -> tuple[list[PostRecord], list[tuple[str, str]]]:
    seen: set[int] = set()
    kept, dropped = [], []
    for rec in records:
        reason = filter_post(rec, seen)
        if reason is None:
            kept.append(rec)
        else:
            dropped.append((rec.id, reason))
    return kept, dropped


def filter_attributes(attrs: Sequence[Attribute], threshold: float = ATTRIBUTE_THRESHOLD) -> list[Attribute]:
    best: dict[str, Attribute] = {}
    for a in attrs:
        if a.confidence < threshold:
            continue
        cur = best.get(a.cls)
        if cur is None or a.confidence > cur.confidence:
            best[a.cls] = a
    # stable sort keeps input order among equal confidences
    return sorted(best.values(), key=lambda a: -a.confidence)


def clean_record(record: PostRecord, translate: Callable[[str], str] = identity_translate,
                 threshold: float = ATTRIBUTE_THRESHOLD) -> PostRecord:
    return PostRecord(
        id=record.id,
        raw_text=record.raw_text,
        tokens=clean_text(record.raw_text, translate),
        regions=list(record.regions),
        attributes=filter_attributes(record.attributes, threshold),
        label=record.label,
        has_person=record.has_person,
    )


# ---------------------------------------------------------------- file format


def _fail(path, lineno, msg):
    raise DatasetFormatError(f"{path}:{lineno}: {msg}")


def _parse_label(value, path, lineno) -> int:
    if isinstance(value, str) and value.lower() in LABEL_INDEX:
        return LABEL_INDEX[value.lower()]
    if isinstance(value, int) and not isinstance(value, bool) and 0 <= value < len(LABELS):
        return value
    _fail(path, lineno, f"field 'label': expected one of {list(LABELS)} or 0..2, got {value!r}")


def parse_record(obj: dict, path="<record>", lineno: int = 1, require_label: bool = True,
                 vision_dim: int = VISION_DIM) -> PostRecord:
    if not isinstance(obj, dict):
        _fail(path, lineno, "record must be a JSON object")
    if "id" not in obj:
        _fail(path, lineno, "field 'id': missing")
    text = obj.get("text")
    if not isinstance(text, str):
        _fail(path, lineno, "field 'text': missing or not a string")

    regions = []
    n_global = 0
    for j, r in enumerate(obj.get("regions", [])):
        role = r.get("role") if isinstance(r, dict) else None
        if role not in ROLES:
            _fail(path, lineno, f"field 'regions[{j}].role': expected one of {list(ROLES)}, got {role!r}")
        vec = r.get("vec")
        if not isinstance(vec, list) or len(vec) != vision_dim:
            got = len(vec) if isinstance(vec, list) else type(vec).__name__
            _fail(path, lineno, f"field 'regions[{j}].vec': expected {vision_dim} numbers, got {got}")
        try:
            arr = np.array(vec, dtype=np.float64)
        except (TypeError, ValueError):
            _fail(path, lineno, f"field 'regions[{j}].vec': non-numeric entry")
        if not np.isfinite(arr).all():
            _fail(path, lineno, f"field 'regions[{j}].vec': non-finite entry")
        n_global += role == "global"
        regions.append(Region(role, arr))
    if n_global > 1:
        _fail(path, lineno, "field 'regions': more than one global region")

    attrs = []
    for j, a in enumerate(obj.get("attributes", [])):
        if not isinstance(a, dict):
            _fail(path, lineno, f"field 'attributes[{j}]': expected an object")
        cls = normalize_class(str(a.get("class", "")))
        if cls not in ATTRIBUTE_SLOT:
            _fail(path, lineno, f"field 'attributes[{j}].class': unknown class {a.get('class')!r}")
        conf = a.get("confidence")
        if not isinstance(conf, (int, float)) or isinstance(conf, bool) or not 0.0 <= conf <= 1.0:
            _fail(path, lineno, f"field 'attributes[{j}].confidence': expected a number in [0, 1], got {conf!r}")
        value = a.get("value")
        if not isinstance(value, str):
            _fail(path, lineno, f"field 'attributes[{j}].value': expected a string")
        attrs.append(Attribute(cls, value, float(conf)))

    label = None
    if obj.get("label") is not None:
        label = _parse_label(obj["label"], path, lineno)
    elif require_label:
        _fail(path, lineno, "field 'label': missing (required for training data)")

    tokens = obj.get("tokens")
    if tokens is None:
        tokens = clean_text(text)
    elif not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        _fail(path, lineno, "field 'tokens': expected a list of strings")
    has_person = obj.get("has_person")
    if has_person is not None and not isinstance(has_person, bool):
        _fail(path, lineno, "field 'has_person': expected a boolean")
    return PostRecord(str(obj["id"]), text, list(tokens), regions, attrs, label, has_person)


def load_dataset(path, require_label: bool = True, vision_dim: int = VISION_DIM) -> list[PostRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                _fail(path, lineno, f"invalid JSON ({exc.msg})")
            records.append(parse_record(obj, path, lineno, require_label, vision_dim))
    return records


def record_to_json(rec: PostRecord, with_tokens: bool = True) -> dict:
    obj = {
        "id": rec.id,
        "text": rec.raw_text,
        "regions": [{"role": r.role, "vec": [float(x) for x in r.vec]} for r in rec.regions],
        "attributes": [{"class": a.cls, "value": a.value, "confidence": a.confidence} for a in rec.attributes],
    }
    if with_tokens:
        obj["tokens"] = list(rec.tokens)
    if rec.label is not None:
        obj["label"] = rec.label
    if rec.has_person is not None:
        obj["has_person"] = rec.has_person
    return obj


def save_dataset(records: Iterable[PostRecord], path, with_tokens: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_json(rec, with_tokens), ensure_ascii=False) + "\n")


def data_fingerprint(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------- splitting


def split_sizes(n: int) -> tuple[int, int, int]:
    held = math.floor(n / 10 + 0.5)
    return n - 2 * held, held, held


def split_dataset(records: Sequence[PostRecord], seed: int) -> DatasetSplit:
    n = len(records)
    if n < 10:
        raise ValueError(f"need at least 10 records to split, got {n}")
    n_train, n_val, _ = split_sizes(n)
    order = np.random.default_rng(seed).permutation(n)
    pick = [records[i] for i in order]
    return DatasetSplit(
        train=pick[:n_train],
        val=pick[n_train:n_train + n_val],
        test=pick[n_train + n_val:],
        seed=seed,
    )


# ---------------------------------------------------------------- synthetic posts

_LEXICON = {
    0: "love gorgeous stunning obsessed beautiful amazing perfect cute adore favorite "
       "happy elegant chic flawless dreamy lovely wonderful comfy fabulous best".split(),
    1: "ugly hate awful terrible worst disappointed cheap tacky weird gross regret "
       "boring ridiculous horrible itchy ruined fake overpriced sad cringe".split(),
    2: "sale available shop link order discount new collection sizes shipping price "
       "code restock launch store online delivery offer stock visit".split(),
}
_FILLER = (
    "the my this outfit today look wearing with and for dress shoes jacket style day "
    "in on a of to it is at new week street photo summer winter weekend coat bag"
).split()
_HASHTAGS = "#fashion #ootd #instagood #style #tbt #outfit #streetstyle #lookbook".split()
_EMOJI_BY_CLASS = {0: "\U0001F60D", 1: "\U0001F644", 2: "\U0001F6CD"}
_ATTRIBUTE_VALUES = {
    "category": ["dress", "top", "jeans", "skirt", "coat", "jumpsuit"],
    "top_category": ["clothing", "footwear", "accessories"],
    "subcategory": ["maxi dress", "t shirt", "blazer", "hoodie", "sneakers", "midi skirt"],
    "layers": ["single", "layered"],
    "style": ["elegant", "casual", "sporty", "boho", "vintage", "streetwear"],
    "cut": ["slim", "wide", "straight", "flared"],
    "color": ["black", "white", "red", "blue", "beige", "black and white", "pink", "green"],
    "pattern": ["solid", "floral", "striped", "checked", "animal print", "polka dot"],
    "age": ["adult", "teen", "kids"],
    "material": ["denim", "cotton", "leather", "silk", "wool", "polyester"],
    "length": ["mini", "midi", "maxi", "knee length"],
    "neckline": ["v neck", "round neck", "off shoulder", "turtleneck"],
    "gender": ["women", "men", "unisex"],
    "sleeves": ["long sleeves", "short sleeves", "sleeveless"],
    "gemstones": ["none", "pearl", "diamond"],
    "fit": ["regular", "oversized", "tight"],
    "hood": ["yes", "no"],
    "height": ["low", "mid", "high"],
    "embellishment": ["none", "sequins", "ruffles", "embroidery"],
    "type": ["formal", "everyday", "party", "beach"],
}


def generate_synthetic(n: int, seed: int, signal_strength: float = 1.0,
                       modality_strength: tuple[float, float, float] = (1.0, 1.0, 1.0),
                       vision_dim: int = VISION_DIM) -> list[PostRecord]:
    """Labelled posts whose vision, text and attribute content depends on the class.

    ``signal_strength`` scales every class-dependent shift; at 0 all features
    are drawn independently of the label.  ``modality_strength`` multiplies it
    per modality (vision, text, attributes).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    world = np.random.default_rng([seed, 0])
    rng = np.random.default_rng([seed, 1])
    sv, st, sa = (signal_strength * m for m in modality_strength)

    def directions():
        d = world.standard_normal((3, vision_dim))
        return d / np.linalg.norm(d, axis=1, keepdims=True)

    global_dir, face_dir = directions(), directions()
    item_mean = world.standard_normal(vision_dim) * 0.1
    preferred = {c: {k: int(world.integers(len(v))) for k, v in _ATTRIBUTE_VALUES.items()} for c in range(3)}
    background = _FILLER + [w for ws in _LEXICON.values() for w in ws]
    p_text = st / (1.0 + st)
    p_attr = sa / (1.0 + sa)
    noise = 0.5

    records = []
    for i in range(n):
        label = int(rng.integers(3))
        regions = [Region("global", noise * rng.standard_normal(vision_dim) + 1.5 * sv * global_dir[label])]
        for _ in range(int(rng.integers(0, 3))):
            regions.append(Region("face", noise * rng.standard_normal(vision_dim) + 1.5 * sv * face_dir[label]))
        for _ in range(int(rng.integers(0, 4))):
            regions.append(Region("item", noise * rng.standard_normal(vision_dim) + item_mean))

        words = []
        for _ in range(int(rng.integers(8, 21))):
            if rng.random() < p_text:
                words.append(_LEXICON[label][int(rng.integers(len(_LEXICON[label])))])
            else:
                words.append(background[int(rng.integers(len(background)))])
        words += list(rng.choice(_HASHTAGS, size=int(rng.integers(0, 8))))
        if rng.random() < 0.3:
            words.insert(int(rng.integers(len(words) + 1)), "@" + f"user{int(rng.integers(1000))}")
        if rng.random() < 0.3:
            words.append("https://shop.example/p/" + str(int(rng.integers(10**6))))
        if rng.random() < 0.5:
            emo_cls = label if rng.random() < p_text else int(rng.integers(3))
            words.insert(int(rng.integers(len(words) + 1)), _EMOJI_BY_CLASS[emo_cls])
        text = " ".join(words)

        attrs = []
        classes = rng.choice(len(ATTRIBUTE_CLASSES), size=int(rng.integers(3, 9)), replace=False)
        for ci in sorted(classes):
            cls = ATTRIBUTE_CLASSES[ci]
            values = _ATTRIBUTE_VALUES[cls]
            if rng.random() < p_attr:
                value = values[preferred[label][cls]]
            else:
                value = values[int(rng.integers(len(values)))]
            attrs.append(Attribute(cls, value, round(float(rng.uniform(0.3, 1.0)), 4)))
            if rng.random() < 0.1:
                other = values[int(rng.integers(len(values)))]
                attrs.append(Attribute(cls, other, round(float(rng.uniform(0.0, 1.0)), 4)))

        records.append(PostRecord(
            id=f"syn{seed}-{i:05d}",
            raw_text=text,
            tokens=clean_text(text),
            regions=regions,
            attributes=attrs,
            label=label,
            has_person=True,
        ))
    return records
