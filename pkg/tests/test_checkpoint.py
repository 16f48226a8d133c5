import numpy as np
import pytest

from auvdock.checkpoint import MAGIC, Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from auvdock.learner import AdamState, PolicyParams


def _ckpt(rng, with_opt=True):
    params = PolicyParams.init(rng, 21, 8, hidden=(16, 16))
    opt = None
    if with_opt:
        opt = AdamState.zeros_like(params)
        for k in opt.m:
            opt.m[k] = rng.standard_normal(opt.m[k].shape)
            opt.v[k] = rng.uniform(size=opt.v[k].shape)
        opt.step = 17
    return Checkpoint(params, opt, {"name": "naive", "x": [1, 2]}, "abc123", "naive", 2, 40, {"k": 1})


def test_round_trip(tmp_path, rng):
    ck = _ckpt(rng)
    save_checkpoint(tmp_path / "a.ckpt", ck)
    back = load_checkpoint(tmp_path / "a.ckpt")
    assert list(back.params.tensors) == list(ck.params.tensors)
    for k, v in ck.params.tensors.items():
        np.testing.assert_array_equal(back.params.tensors[k], v)
    for k in ck.optimizer.m:
        np.testing.assert_array_equal(back.optimizer.m[k], ck.optimizer.m[k])
        np.testing.assert_array_equal(back.optimizer.v[k], ck.optimizer.v[k])
    assert back.optimizer.step == 17
    assert (back.config, back.config_hash, back.seed, back.iteration, back.rng_state) == (
        ck.config, ck.config_hash, 2, 40, {"k": 1},
    )


def test_byte_identical_rewrite(tmp_path, rng):
    ck = _ckpt(rng)
    save_checkpoint(tmp_path / "a.ckpt", ck)
    save_checkpoint(tmp_path / "b.ckpt", load_checkpoint(tmp_path / "a.ckpt"))
    assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()
    assert (tmp_path / "a.ckpt").read_bytes().startswith(MAGIC)


def test_without_optimizer(tmp_path, rng):
    save_checkpoint(tmp_path / "p.ckpt", _ckpt(rng, with_opt=False))
    assert load_checkpoint(tmp_path / "p.ckpt").optimizer is None


def test_bad_magic(tmp_path):
    (tmp_path / "x.ckpt").write_bytes(b"not a checkpoint\n{}\n")
    with pytest.raises(CheckpointError, match="magic"):
        load_checkpoint(tmp_path / "x.ckpt")


def test_wrong_version(tmp_path, rng):
    save_checkpoint(tmp_path / "a.ckpt", _ckpt(rng))
    raw = (tmp_path / "a.ckpt").read_bytes().replace(b'"version":1', b'"version":99', 1)
    (tmp_path / "a.ckpt").write_bytes(raw)
    with pytest.raises(CheckpointError, match="version"):
        load_checkpoint(tmp_path / "a.ckpt")


def test_truncated(tmp_path, rng):
    save_checkpoint(tmp_path / "a.ckpt", _ckpt(rng))
    raw = (tmp_path / "a.ckpt").read_bytes()
    (tmp_path / "a.ckpt").write_bytes(raw[:-80])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(tmp_path / "a.ckpt")


def test_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / "nope.ckpt")
