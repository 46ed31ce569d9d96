"""JSON matrix files: complex entries are ``[re, im]`` pairs."""

from __future__ import annotations

import json

import numpy as np

from ._common import as_density, as_hermitian

KINDS = ("hermitian", "density", "vector", "kraus")


class MatrixFileError(ValueError):
    """Malformed matrix file (schema or shape)."""


def encode_complex(arr):
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [encode_complex(a) for a in arr]


def decode_complex(data, ndim):
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixFileError(f"entries are not numeric [re, im] pairs: {exc}") from None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise MatrixFileError(f"expected a {ndim}-d array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def to_matrix_file(kind, value, dims=None):
    if kind not in KINDS:
        raise MatrixFileError(f"unknown kind {kind!r}")
    return {"kind": kind, "dims": None if dims is None else [int(d) for d in dims], "matrix": encode_complex(value)}


def from_matrix_file(doc, validate=True):
    """Return ``(kind, array, dims)``; density files are validated on load."""
    if not isinstance(doc, dict) or "kind" not in doc or "matrix" not in doc:
        raise MatrixFileError("matrix file needs 'kind' and 'matrix'")
    kind = doc["kind"]
    if kind not in KINDS:
        raise MatrixFileError(f"unknown kind {kind!r}")
    ndim = {"vector": 1, "kraus": 3}.get(kind, 2)
    arr = decode_complex(doc["matrix"], ndim)
    if kind != "vector" and arr.shape[-1] != arr.shape[-2]:
        raise MatrixFileError(f"{kind} matrices must be square, got shape {arr.shape}")
    dims = doc.get("dims")
    if dims is not None:
        dims = tuple(int(d) for d in dims)
        if int(np.prod(dims)) != arr.shape[-1]:
            raise MatrixFileError(f"dims {dims} do not multiply to {arr.shape[-1]}")
    if validate:
        if kind == "density":
            arr = as_density(arr)
        elif kind == "hermitian":
            arr = as_hermitian(arr)
    return kind, arr, dims


def dumps(obj):
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads_matrix_file(text, validate=True):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"invalid JSON: {exc}") from None
    return from_matrix_file(doc, validate)
