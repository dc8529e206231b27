import json
import re
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fashsent.data import (
    ATTRIBUTE_CLASSES, MAX_TOKENS, Attribute, DatasetFormatError, PostRecord, Region, clean_record,
    clean_text, filter_attributes, filter_posts, generate_synthetic, load_dataset, save_dataset,
    split_dataset, split_sizes,
)
from fashsent.encoders import SyntheticEmbeddings, encode_record

FIXTURES = Path(__file__).parent / "fixtures"


def record(rid="r", tokens=("a", "b", "c", "d", "e"), vec=0.1, **kw):
    return PostRecord(rid, " ".join(tokens), list(tokens), [Region("global", np.full(512, vec))], [], 0, **kw)


# ---------------------------------------------------------------- clean_text

def test_clean_text_spec_examples():
    assert clean_text("@bob see https://x.co 😀 nice") == ["see", "grinning_face", "nice"]
    assert clean_text("") == []
    assert clean_text("#a #b #c #d #e #f ok") == ["#a", "#b", "#c", "#d", "#e", "ok"]


def test_translate_hook_runs_after_url_and_mention_removal():
    seen = []
    clean_text("Hi @x http://y.z there", translate=lambda t: seen.append(t) or t.replace("hi", "hello"))
    assert "@x" not in seen[0] and "http" not in seen[0]
    assert clean_text("hi there", translate=lambda t: t.replace("hi", "hello")) == ["hello", "there"]


text_st = st.text(st.characters(blacklist_categories=("Cs",)), max_size=120) | st.lists(
    st.sampled_from(["#tag", "@user", "http://a.b/c", "😀", "🔥", "Hi", "wow!", "it's", "www.x.y", " ", "\n"]),
    max_size=40).map("".join)


@given(text_st)
def test_clean_text_idempotent(raw):
    tokens = clean_text(raw)
    assert clean_text(" ".join(tokens)) == tokens


@given(text_st)
def test_clean_text_limits(raw):
    tokens = clean_text(raw)
    assert len(tokens) <= MAX_TOKENS
    assert sum(t.startswith("#") and len(t) > 1 for t in tokens) <= 5
    assert all(t == t.lower() and t.strip() == t and t for t in tokens)
    assert not any(t.startswith("@") and len(t) > 1 for t in tokens)


# ---------------------------------------------------------------- filter rules

def test_filter_post_examples():
    kept, dropped = filter_posts([
        record("four", tokens=("a", "b", "c", "d")),
        record("five", vec=0.2),
        record("copy", tokens=("v", "w", "x", "y", "z"), vec=0.2),
    ])
    assert [r.id for r in kept] == ["five"]
    assert dropped == [("four", "too_short"), ("copy", "duplicate")]


def test_dropped_posts_do_not_claim_fingerprints():
    kept, _ = filter_posts([record("short", tokens=("a",), vec=0.5), record("full", vec=0.5)])
    assert [r.id for r in kept] == ["full"]


@given(st.lists(st.integers(0, 4), min_size=1, max_size=15))
def test_kept_fingerprints_are_unique(vec_ids):
    recs = [record(str(i), vec=v / 10) for i, v in enumerate(vec_ids)]
    kept, dropped = filter_posts(recs)
    assert len(kept) == len(set(vec_ids))
    assert len(kept) + len(dropped) == len(recs)


def test_filter_attributes_examples():
    a = Attribute("style", "elegant", 0.9)
    assert filter_attributes([a, Attribute("hood", "yes", 0.3)]) == [a]
    assert filter_attributes([]) == []
    blue = Attribute("color", "blue", 0.8)
    assert filter_attributes([Attribute("color", "red", 0.6), blue]) == [blue]


@given(st.lists(st.tuples(st.sampled_from(ATTRIBUTE_CLASSES), st.floats(0, 1)), max_size=30),
       st.floats(0, 1))
def test_filter_attributes_properties(raw, threshold):
    out = filter_attributes([Attribute(c, "v", p) for c, p in raw], threshold)
    confs = [a.confidence for a in out]
    assert confs == sorted(confs, reverse=True)
    assert all(c >= threshold for c in confs)
    assert len({a.cls for a in out}) == len(out)
    for a in out:
        assert a.confidence == max(p for c, p in raw if c == a.cls)


# ---------------------------------------------------------------- golden files

def test_clean_text_golden_file():
    cases = json.loads((FIXTURES / "clean_text_cases.json").read_text(encoding="utf-8"))
    for case in cases:
        assert clean_text(case["raw"]) == case["tokens"], case["raw"]


def test_filter_golden_file():
    records = [clean_record(r) for r in load_dataset(FIXTURES / "filter_posts.jsonl")]
    kept, dropped = filter_posts(records)
    got = {r.id: "keep" for r in kept} | dict(dropped)
    lines = [f"{r.id}\t{got[r.id]}" for r in records]
    assert "\n".join(lines) + "\n" == (FIXTURES / "filter_expected.tsv").read_text(encoding="utf-8")


# ---------------------------------------------------------------- file format

def test_load_empty_file(tmp_path):
    (tmp_path / "e.jsonl").write_text("")
    assert load_dataset(tmp_path / "e.jsonl") == []


def test_load_three_lines_preserves_order(tmp_path):
    recs = generate_synthetic(3, 0)
    save_dataset(recs, tmp_path / "d.jsonl")
    back = load_dataset(tmp_path / "d.jsonl")
    assert [r.id for r in back] == [r.id for r in recs]
    assert all(np.array_equal(a.regions[0].vec, b.regions[0].vec) for a, b in zip(recs, back))


def test_missing_label_names_line(tmp_path):
    rows = [r for r in (FIXTURES / "filter_posts.jsonl").read_text(encoding="utf-8").splitlines()[:3]]
    obj = json.loads(rows[1])
    del obj["label"]
    rows[1] = json.dumps(obj)
    (tmp_path / "d.jsonl").write_text("\n".join(rows) + "\n", encoding="utf-8")
    with pytest.raises(DatasetFormatError, match=r"d\.jsonl:2: field 'label'"):
        load_dataset(tmp_path / "d.jsonl")
    assert load_dataset(tmp_path / "d.jsonl", require_label=False)[1].label is None


@pytest.mark.parametrize("mutate, field", [
    (lambda o: o["regions"][0].update(vec=[0.0] * 3), "regions[0].vec"),
    (lambda o: o["regions"].append(dict(o["regions"][0])), "regions"),
    (lambda o: o.update(attributes=[{"class": "mood", "value": "x", "confidence": 0.9}]), "attributes[0].class"),
    (lambda o: o.update(attributes=[{"class": "color", "value": "x", "confidence": 1.5}]), "attributes[0].confidence"),
    (lambda o: o.update(label="angry"), "label"),
])
def test_malformed_fields_are_reported(tmp_path, mutate, field):
    obj = json.loads((FIXTURES / "filter_posts.jsonl").read_text(encoding="utf-8").splitlines()[0])
    mutate(obj)
    (tmp_path / "d.jsonl").write_text(json.dumps(obj) + "\n")
    with pytest.raises(DatasetFormatError, match=r"d\.jsonl:1: field '" + re.escape(field) + "'"):
        load_dataset(tmp_path / "d.jsonl")


# ---------------------------------------------------------------- splitting

def test_split_examples():
    assert split_sizes(100) == (80, 10, 10)
    assert split_sizes(12) == (10, 1, 1)
    recs = generate_synthetic(12, 0)
    a, b = split_dataset(recs, 5), split_dataset(recs, 5)
    assert [r.id for r in a.train + a.val + a.test] == [r.id for r in b.train + b.val + b.test]


def test_split_needs_ten_records():
    with pytest.raises(ValueError):
        split_dataset(generate_synthetic(9, 0), 0)


@given(st.integers(10, 5000))
def test_split_proportions_within_one_record(n):
    sizes = split_sizes(n)
    assert sum(sizes) == n
    for size, share in zip(sizes, (0.8, 0.1, 0.1)):
        assert abs(size - share * n) <= 1


@given(st.integers(10, 60), st.integers(0, 2**32 - 1))
def test_split_is_a_partition(n, seed):
    recs = [record(str(i)) for i in range(n)]
    s = split_dataset(recs, seed)
    ids = [r.id for r in s.train + s.val + s.test]
    assert sorted(ids) == sorted(r.id for r in recs)


# ---------------------------------------------------------------- synthetic data

def _pooled(records, provider):
    rows = []
    for r in records:
        e = encode_record(r, provider)
        attr = e.attrs.matrix[e.attrs.mask].mean(axis=0) if e.attrs.mask.any() else np.zeros(provider.dim)
        rows.append(np.concatenate([e.vision.global_vec, e.text.matrix.mean(axis=0), attr]))
    return np.array(rows), np.array([r.label for r in records])


def _centroid_probe(x_fit, y_fit, x):
    centroids = np.stack([x_fit[y_fit == c].mean(axis=0) for c in range(3)])
    return np.argmin(((x[:, None] - centroids[None]) ** 2).sum(axis=-1), axis=1)


def test_synthetic_is_deterministic():
    a, b = generate_synthetic(20, 4, 0.7), generate_synthetic(20, 4, 0.7)
    assert [record_json(r) for r in a] == [record_json(r) for r in b]


def record_json(r):
    from fashsent.data import record_to_json
    return json.dumps(record_to_json(r))


def test_strong_signal_is_linearly_separable():
    # nearest-centroid is a linear rule: fitted on 64 posts, it separates them and generalises
    provider = SyntheticEmbeddings(300, 0)
    x, y = _pooled(generate_synthetic(300, 0, 2.0), provider)
    assert (_centroid_probe(x[:64], y[:64], x[:64]) == y[:64]).mean() == 1.0
    assert (_centroid_probe(x[:64], y[:64], x[64:]) == y[64:]).mean() >= 0.95


def test_zero_signal_probe_is_at_chance():
    provider = SyntheticEmbeddings(300, 0)
    x, y = _pooled(generate_synthetic(600, 1, 0.0), provider)
    acc = (_centroid_probe(x[:300], y[:300], x[300:]) == y[300:]).mean()
    assert 0.2 <= acc <= 0.47


def test_synthetic_records_pass_filters():
    recs = generate_synthetic(50, 2)
    kept, dropped = filter_posts(recs)
    assert dropped == []
    assert all(r.tokens == clean_text(r.raw_text) for r in recs)
