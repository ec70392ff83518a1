"""Structured systems on disk: a JSON descriptor plus Matrix Market files.

Descriptor layout::

    {"n": 1000, "m": 1, "p": 1,
     "terms": [{"slot": "K", "kind": "monomial", "params": {"power": 1},
                "matrix_file": "K0.mtx"}, ...]}

Matrix paths are resolved relative to the descriptor.
"""

import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sps

from ..errors import DimensionMismatch, ParseError
from ..system import StructuredSystem
from ..terms import term_from_dict

_SLOTS = ("K", "B", "C")


def _read_matrix(path):
    if not path.is_file():
        raise FileNotFoundError(f"matrix file not found: {path}")
    try:
        M = scipy.io.mmread(str(path))
    except Exception as exc:
        raise ParseError(f"cannot parse Matrix Market file {path}: {exc}") from exc
    return sps.csr_matrix(M) if sps.issparse(M) else np.asarray(M)


def _expected_shape(slot, n, m, p):
    return {"K": (n, n), "B": (n, m), "C": (p, n)}[slot]


def load_system(descriptor_path):
    path = Path(descriptor_path)
    if not path.is_file():
        raise FileNotFoundError(f"descriptor not found: {path}")
    try:
        desc = json.loads(path.read_text(encoding="utf-8"))
        terms = desc["terms"]
        dims = {k: desc.get(k) for k in ("n", "m", "p")}
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed descriptor {path}: {exc}") from exc
    slots = {s: [] for s in _SLOTS}
    first = {}
    for k, entry in enumerate(terms):
        try:
            slot, fname = entry["slot"], entry["matrix_file"]
            term = term_from_dict(entry)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: bad term entry {k}: {exc}") from exc
        if slot not in slots:
            raise ParseError(f"{path}: term {k} has unknown slot {slot!r}")
        mpath = path.parent / fname
        M = _read_matrix(mpath)
        _check_dims(slot, M.shape, mpath, dims, first)
        slots[slot].append((term, M))
    for s in _SLOTS:
        if not slots[s]:
            raise ParseError(f"{path}: no {s} terms")
    return StructuredSystem(slots["K"], slots["B"], slots["C"])


def _check_dims(slot, shape, mpath, dims, first):
    """Infer n, m, p from the first file that fixes them; name both files on conflict."""
    rows, cols = shape
    claims = {"K": (("n", rows), ("n", cols)), "B": (("n", rows), ("m", cols)),
              "C": (("p", rows), ("n", cols))}[slot]
    for key, val in claims:
        if dims.get(key) is None:
            dims[key] = val
            first[key] = mpath
        elif dims[key] != val:
            other = first.get(key, "the descriptor")
            raise DimensionMismatch(
                f"{key}={val} in {mpath} conflicts with {key}={dims[key]} from {other}")
        else:
            first.setdefault(key, mpath)


def save_system(sys, descriptor_path, prefix=None):
    """Write ``sys`` as a descriptor and one Matrix Market file per term."""
    path = Path(descriptor_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    prefix = path.stem if prefix is None else prefix
    entries = []
    counts = {s: 0 for s in _SLOTS}
    for slot, term, M in sys.matrices():
        fname = f"{prefix}_{slot}{counts[slot]}.mtx"
        counts[slot] += 1
        scipy.io.mmwrite(str(path.parent / fname), sps.coo_matrix(M) if sps.issparse(M) else M,
                         precision=17)
        entries.append({"slot": slot, "matrix_file": fname, **term.to_dict()})
    desc = {"n": sys.n, "m": sys.m, "p": sys.p, "terms": entries}
    path.write_text(json.dumps(desc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
