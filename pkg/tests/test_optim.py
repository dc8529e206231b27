import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fashsent.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from fashsent.optim import OptimizerState, adamw_step, lr_schedule


def test_lr_schedule_exact_values():
    assert lr_schedule(0) == 0.001
    assert lr_schedule(9) == 0.001
    assert lr_schedule(10) == 0.00048
    assert lr_schedule(20) == 0.0002304


def test_lr_schedule_rejects_negative_epoch():
    with pytest.raises(ValueError):
        lr_schedule(-1)


def test_zero_grad_zero_decay_is_noop():
    p = {"w": np.array([1.5, -2.0])}
    adamw_step(p, {"w": np.zeros(2)}, OptimizerState(weight_decay=0.0), lr=0.01)
    assert p["w"].tolist() == [1.5, -2.0]


def test_decay_only():
    p = {"w": np.array([2.0, -4.0])}
    adamw_step(p, {"w": np.zeros(2)}, OptimizerState(weight_decay=0.1), lr=0.01)
    assert np.allclose(p["w"], np.array([2.0, -4.0]) * (1 - 0.01 * 0.1), rtol=0, atol=1e-15)


@given(st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3))
def test_first_step_moves_by_lr(g):
    p = {"w": np.array(0.7)}
    adamw_step(p, {"w": np.array(g)}, OptimizerState(weight_decay=0.0), lr=0.001)
    # bias-corrected first step: m_hat = g, v_hat = g^2
    assert p["w"] - 0.7 == pytest.approx(-0.001 * np.sign(g), rel=1e-4)


def test_matches_reference_update_over_steps(rng):
    state = OptimizerState(betas=(0.55, 0.999), eps=1e-8, weight_decay=0.01)
    p = {"w": rng.normal(size=3)}
    ref = p["w"].copy()
    m = np.zeros(3)
    v = np.zeros(3)
    for t in range(1, 6):
        g = rng.normal(size=3)
        adamw_step(p, {"w": g}, state, lr=0.002)
        ref = ref * (1 - 0.002 * 0.01)
        m = 0.55 * m + 0.45 * g
        v = 0.999 * v + 0.001 * g * g
        ref = ref - 0.002 * (m / (1 - 0.55 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
    assert np.allclose(p["w"], ref, rtol=1e-12, atol=1e-15)
    assert state.t == 5 and state.m["w"].shape == (3,)


def test_nan_gradient_aborts_naming_parameter():
    p = {"good": np.ones(2), "bad": np.ones(2)}
    with pytest.raises(FloatingPointError, match="bad"):
        adamw_step(p, {"good": np.ones(2), "bad": np.array([1.0, np.nan])}, OptimizerState(), lr=0.001)
    assert p["good"].tolist() == [1.0, 1.0]


def test_non_positive_lr_rejected():
    with pytest.raises(ValueError):
        adamw_step({"w": np.ones(1)}, {"w": np.ones(1)}, OptimizerState(), lr=0.0)


# ---------------------------------------------------------------- checkpoints

@given(st.dictionaries(st.text(min_size=1, max_size=8),
                       st.lists(st.floats(allow_nan=False, width=64), min_size=0, max_size=6), max_size=4))
def test_checkpoint_round_trip_is_exact(tmp_path_factory, raw):
    path = tmp_path_factory.mktemp("ck") / "x.ckpt"
    tensors = {k: np.array(v, dtype=np.float64) for k, v in raw.items()}
    save_checkpoint(path, tensors, {"betas": [0.55, 0.999]})
    back, meta = load_checkpoint(path)
    assert list(back) == list(tensors)
    for k in tensors:
        assert back[k].tobytes() == tensors[k].tobytes()
    assert meta == {"betas": [0.55, 0.999]}


def test_checkpoint_bytes_are_deterministic(tmp_path, rng):
    t = {"a": rng.normal(size=(2, 3)), "b": np.array(1.0)}
    save_checkpoint(tmp_path / "1", t, {"k": 1})
    save_checkpoint(tmp_path / "2", t, {"k": 1})
    assert (tmp_path / "1").read_bytes() == (tmp_path / "2").read_bytes()


def test_checkpoint_rejects_foreign_file(tmp_path):
    (tmp_path / "x").write_bytes(b"not a checkpoint")
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "x")
