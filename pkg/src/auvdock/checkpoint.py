"""Checkpoint container.

Layout (version 1)::

    AUVDOCK-CKPT\\n                 magic line
    <header JSON>\\n                 one line, keys sorted
    <payload>                       little-endian float64 arrays, back to back

The header holds ``version``, ``config_hash``, the resolved ``config``,
``config_name``, ``seed``, ``iteration``, the policy RNG ``rng_state``,
``adam_step`` and a ``tensors`` list of ``{"name", "shape", "offset"}``
entries (offset in float64 elements into the payload). Tensor names are the
policy parameters (``actor/<i>/W``, ``critic/<i>/b``, ``log_std``) followed by
the Adam moments (``adam_m/<name>``, ``adam_v/<name>``).

Everything is written deterministically, so identical training runs give
byte-identical files.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .learner import AdamState, PolicyParams

MAGIC = b"AUVDOCK-CKPT\n"
VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass
class Checkpoint:
    params: PolicyParams
    optimizer: AdamState | None
    config: dict
    config_hash: str
    config_name: str
    seed: int
    iteration: int
    rng_state: dict | None = None


def save_checkpoint(path, ckpt: Checkpoint) -> None:
    arrays: list[tuple[str, np.ndarray]] = list(ckpt.params.tensors.items())
    if ckpt.optimizer is not None:
        arrays += [(f"adam_m/{k}", v) for k, v in ckpt.optimizer.m.items()]
        arrays += [(f"adam_v/{k}", v) for k, v in ckpt.optimizer.v.items()]
    entries, offset = [], 0
    for name, arr in arrays:
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset})
        offset += arr.size
    header = {
        "version": VERSION,
        "config_hash": ckpt.config_hash,
        "config": ckpt.config,
        "config_name": ckpt.config_name,
        "seed": int(ckpt.seed),
        "iteration": int(ckpt.iteration),
        "rng_state": ckpt.rng_state,
        "adam_step": None if ckpt.optimizer is None else ckpt.optimizer.step,
        "tensors": entries,
    }
    blob = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for _, a in arrays)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")).encode() + b"\n")
        fh.write(blob)
    os.replace(tmp, path)


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    raw = path.read_bytes()
    if not raw.startswith(MAGIC):
        raise CheckpointError(f"{path}: not an auvdock checkpoint (bad magic)")
    end = raw.index(b"\n", len(MAGIC))
    header = json.loads(raw[len(MAGIC) : end])
    if header.get("version") != VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {header.get('version')}")
    payload = np.frombuffer(raw[end + 1 :], dtype="<f8")
    tensors = {}
    for entry in header["tensors"]:
        size = int(np.prod(entry["shape"], dtype=np.int64))
        chunk = payload[entry["offset"] : entry["offset"] + size]
        if chunk.size != size:
            raise CheckpointError(f"{path}: truncated payload at tensor {entry['name']}")
        tensors[entry["name"]] = chunk.reshape(entry["shape"]).astype(float)
    params = PolicyParams({k: v for k, v in tensors.items() if not k.startswith("adam_")})
    optimizer = None
    if header.get("adam_step") is not None:
        m = {k[len("adam_m/") :]: v for k, v in tensors.items() if k.startswith("adam_m/")}
        v = {k[len("adam_v/") :]: v for k, v in tensors.items() if k.startswith("adam_v/")}
        optimizer = AdamState(m, v, step=int(header["adam_step"]))
    return Checkpoint(
        params=params,
        optimizer=optimizer,
        config=header["config"],
        config_hash=header["config_hash"],
        config_name=header["config_name"],
        seed=header["seed"],
        iteration=header["iteration"],
        rng_state=header.get("rng_state"),
    )
