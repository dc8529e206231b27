import dataclasses

import numpy as np
import pytest

from fashsent.data import DatasetSplit, generate_synthetic, split_dataset
from fashsent.encoders import SyntheticEmbeddings, encode_record
from fashsent.model import ConfigError
from fashsent.train import (
    TrainConfig, TrainingDiverged, _shuffled_tokens, argmax_labels, load_model, predict, predict_posts,
    save_model, train,
)


def small(**kw):
    return TrainConfig(preset="small", **kw)


@pytest.fixture(scope="module")
def trained():
    split = split_dataset(generate_synthetic(40, 3, 1.5), 3)
    config = small(epochs=3, seed=3)
    model, log = train(split, config)
    return split, config, model, log


def test_training_is_deterministic(trained):
    split, config, model, log = trained
    model2, log2 = train(split, config)
    assert log2 == log
    assert all(np.array_equal(model.params[n].data, model2.params[n].data) for n in model.params)


def test_log_records_every_epoch(trained):
    _, config, _, log = trained
    assert [e.epoch for e in log.epochs] == list(range(config.epochs))
    assert [e.lr for e in log.epochs] == [0.001] * 3
    w = log.fusion_weights
    assert len(w) == 3 and abs(sum(w) - 1) < 1e-12 and min(w) > 0
    assert log.best_val_accuracy == max(e.val_accuracy for e in log.epochs)


def test_loss_falls_over_first_ten_epochs():
    records = generate_synthetic(64, 0, 2.0)
    _, log = train(DatasetSplit(records, [], [], 0), small(epochs=10, seed=0))
    losses = np.array([e.loss for e in log.epochs])
    moving = np.convolve(losses, np.ones(5) / 5, mode="valid")
    assert (np.diff(moving) < 0).all(), losses


def test_argmax_tie_goes_to_lower_index():
    assert argmax_labels(np.array([[0.4, 0.4, 0.2], [0.2, 0.4, 0.4], [0.3, 0.3, 0.4]])).tolist() == [0, 1, 2]


def test_predict_single_record(trained):
    split, config, model, _ = trained
    provider = SyntheticEmbeddings(16, 0)
    p = predict(model, split.test[0], provider)
    assert abs(sum(p.scores) - 1) < 1e-9
    assert set(p.branch_scores) == {"va", "ta", "vt"}
    assert p.label == int(np.argmax(p.scores))


def test_predict_unencodable_record_names_field(trained):
    split, _, model, _ = trained
    rec = dataclasses.replace(split.test[0], regions=[r for r in split.test[0].regions if r.role != "global"])
    with pytest.raises(ValueError, match="regions"):
        predict(model, rec, SyntheticEmbeddings(16, 0))


def test_va_only_prediction_follows_branch():
    split = split_dataset(generate_synthetic(30, 1), 1)
    model, _ = train(split, small(epochs=1, seed=1, branches=("va",)))
    provider = SyntheticEmbeddings(16, 0)
    preds = predict_posts(model, [encode_record(r, provider, 512) for r in split.train])
    assert all(p.label == int(np.argmax(p.branch_scores["va"])) for p in preds)


def test_checkpoint_round_trip_predicts_identically(trained, tmp_path):
    split, config, model, _ = trained
    provider = SyntheticEmbeddings(16, 0)
    save_model(tmp_path / "m.ckpt", model, provider, config)
    loaded, provider2, meta = load_model(tmp_path / "m.ckpt")
    posts = [encode_record(r, provider, 512) for r in split.test]
    posts2 = [encode_record(r, provider2, 512) for r in split.test]
    assert predict_posts(model, posts) == predict_posts(loaded, posts2)
    assert meta["optimizer"]["betas"] == [0.55, 0.999]
    assert TrainConfig.from_dict(meta["train_config"]) == config


def test_token_shuffle_permutes_rows_only(small_cfg, small_provider):
    rec = generate_synthetic(1, 0)[0]
    post = encode_record(rec, small_provider, 512)
    out = _shuffled_tokens(post, np.random.default_rng(0))
    assert np.array_equal(out.text.mask, post.text.mask)
    assert sorted(map(tuple, out.text.matrix)) == sorted(map(tuple, post.text.matrix))
    assert post.text.matrix is not out.text.matrix


def test_divergence_reports_epoch_and_batch():
    records = generate_synthetic(20, 0)
    records[5].regions[0].vec[3] = np.nan
    with pytest.raises(TrainingDiverged, match="epoch 0, batch 0"):
        train(DatasetSplit(records, [], [], 0), small(epochs=1, batch_size=32))


def test_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(branches=())
    with pytest.raises(ConfigError):
        TrainConfig(branches=("va", "xx"))
    with pytest.raises(ConfigError):
        TrainConfig(kind="svm")
    with pytest.raises(ValueError):
        train(DatasetSplit([], [], [], 0), small())


def test_baseline_kinds_train(trained):
    split = trained[0]
    for kind in ("early", "late", "image-only"):
        model, log = train(split, small(epochs=1, kind=kind))
        assert log.fusion_weights is None and len(log.epochs) == 1


def test_target_accuracy_stops_early():
    records = generate_synthetic(32, 0, 3.0)
    _, log = train(DatasetSplit(records, [], [], 0), small(epochs=50, target_train_accuracy=0.9))
    assert log.stopped_early and len(log.epochs) < 50
    assert log.epochs[-1].train_accuracy >= 0.9
