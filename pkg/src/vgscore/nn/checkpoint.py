"""VGDM checkpoint files.

Layout (little-endian):
  magic   4 bytes  b"VGDM"
  version u32      1
  hlen    u32      byte length of the JSON header
  header  hlen bytes, UTF-8 JSON:
            {"config": {...},          # model/run configuration, free-form
             "layer_spec": {...},      # structural description of the stacks
             "params": [{"name", "dtype", "shape"}, ...],
             "optimizer": null | {"t", "lr0", "decay", "beta1", "beta2", "eps",
                                  "slots": [{"name", "dtype", "shape"}, ...]},
             "extra": {...}}           # e.g. the vocabulary
  data    raw arrays back to back: every params entry in order, then
          every optimizer slot (m then v per parameter) in order.

Writes are atomic (temp file + rename).
"""

import json
import os
import struct
import tempfile

import numpy as np

from ..errors import CorruptCheckpoint, UnsupportedFormat
from .optim import AdamState

_MAGIC = b"VGDM"
_VERSION = 1
_PREFIX = struct.Struct("<4sII")


def _le(dtype) -> np.dtype:
    dt = np.dtype(dtype)
    return dt.newbyteorder("<") if dt.byteorder == ">" else dt


def _entry(name: str, arr: np.ndarray) -> dict:
    return {"name": name, "dtype": _le(arr.dtype).str, "shape": list(arr.shape)}


def save_checkpoint(path, params: list, config: dict, layer_spec: dict,
                    optimizer: AdamState | None = None, extra: dict | None = None):
    """params: [(name, Tensor)] in a stable order."""
    arrays = [(name, np.ascontiguousarray(p.data, dtype=_le(p.data.dtype)))
              for name, p in params]
    header = {
        "config": config,
        "layer_spec": layer_spec,
        "params": [_entry(name, arr) for name, arr in arrays],
        "optimizer": None,
        "extra": extra or {},
    }
    slot_arrays = []
    if optimizer is not None:
        slots = []
        for name, _ in arrays:
            for kind, store in (("m", optimizer.m), ("v", optimizer.v)):
                arr = store.get(name)
                if arr is None:
                    continue
                arr = np.ascontiguousarray(arr, dtype=_le(arr.dtype))
                slots.append(_entry(f"{kind}/{name}", arr))
                slot_arrays.append(arr)
        header["optimizer"] = {
            "t": optimizer.t, "lr0": optimizer.lr0, "decay": optimizer.decay,
            "beta1": optimizer.beta1, "beta2": optimizer.beta2, "eps": optimizer.eps,
            "slots": slots,
        }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".vgdm.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_PREFIX.pack(_MAGIC, _VERSION, len(blob)))
            fh.write(blob)
            for _, arr in arrays:
                fh.write(arr.tobytes())
            for arr in slot_arrays:
                fh.write(arr.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptCheckpoint(f"truncated checkpoint while reading {what}")
    return data


def load_checkpoint(path):
    """Returns (header dict, name -> array for params, name -> array for slots)."""
    with open(path, "rb") as fh:
        magic, version, hlen = _PREFIX.unpack(_read_exact(fh, _PREFIX.size, "prefix"))
        if magic != _MAGIC:
            raise UnsupportedFormat(f"bad magic {magic!r}, expected {_MAGIC!r}")
        if version != _VERSION:
            raise UnsupportedFormat(f"unsupported checkpoint version {version}")
        try:
            header = json.loads(_read_exact(fh, hlen, "header").decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptCheckpoint(f"unreadable header: {exc}") from exc
        params = {}
        for entry in header.get("params", []):
            params[entry["name"]] = _read_array(fh, entry)
        slots = {}
        opt = header.get("optimizer")
        if opt is not None:
            for entry in opt.get("slots", []):
                slots[entry["name"]] = _read_array(fh, entry)
        if fh.read(1):
            raise CorruptCheckpoint("trailing bytes after declared arrays")
    return header, params, slots


def _read_array(fh, entry: dict) -> np.ndarray:
    dtype = np.dtype(entry["dtype"])
    shape = tuple(int(n) for n in entry["shape"])
    count = int(np.prod(shape)) if shape else 1
    raw = _read_exact(fh, count * dtype.itemsize, entry["name"])
    return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()


def restore_optimizer(header: dict, slots: dict) -> AdamState | None:
    opt = header.get("optimizer")
    if opt is None:
        return None
    state = AdamState(lr0=opt["lr0"], decay=opt["decay"], beta1=opt["beta1"],
                      beta2=opt["beta2"], eps=opt["eps"], t=int(opt["t"]))
    for name, arr in slots.items():
        kind, param = name.split("/", 1)
        store = state.m if kind == "m" else state.v
        store[param] = arr.astype(np.float64, copy=False)
    return state
