"""Dense and sparse matrix kernels for the fixed forward/backward graph.

Dense matrices are 2-D float64 C-contiguous numpy arrays. Sparse matrices
are scipy CSR kept in canonical form (sorted column indices, duplicates
summed). Products accumulate in a fixed order, ascending column index
within each row, so repeated runs of the same computation are bit-stable.
"""

from __future__ import annotations

import struct

import numpy as np
from scipy import sparse

DENSE_MAGIC = b"TLDM1\n"


def as_dense(a) -> np.ndarray:
    """Coerce to a 2-D float64 C-contiguous array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def csr_from_coo(rows, cols, values, shape) -> sparse.csr_matrix:
    """Canonical CSR from coordinate triplets; duplicate entries are summed."""
    m = sparse.coo_matrix((values, (rows, cols)), shape=shape, dtype=np.float64).tocsr()
    m.sum_duplicates()
    m.sort_indices()
    return m


def validate_csr(m: sparse.csr_matrix) -> None:
    """Raise ValueError unless `m` satisfies the row-compressed invariants:
    monotone row offsets, strictly increasing column indices per row, and
    nnz equal to the final offset."""
    if not sparse.issparse(m) or m.format != "csr":
        raise ValueError("expected a CSR matrix")
    n_rows, n_cols = m.shape
    indptr, indices = m.indptr, m.indices
    if len(indptr) != n_rows + 1 or indptr[0] != 0:
        raise ValueError("row offsets have the wrong length or do not start at 0")
    if np.any(np.diff(indptr) < 0):
        raise ValueError("row offsets are not monotone")
    if indptr[-1] != len(m.data) or len(m.indices) != len(m.data):
        raise ValueError("nnz bookkeeping is inconsistent")
    if len(indices) and (indices.min() < 0 or indices.max() >= n_cols):
        raise ValueError("column index out of range")
    for i in range(n_rows):
        row = indices[indptr[i]:indptr[i + 1]]
        if row.size > 1 and np.any(np.diff(row) <= 0):
            raise ValueError(f"column indices not strictly increasing in row {i}")


def identity_csr(n: int) -> sparse.csr_matrix:
    return sparse.identity(n, dtype=np.float64, format="csr")


def spmm(s: sparse.csr_matrix, d: np.ndarray) -> np.ndarray:
    """Sparse @ dense. Summation runs over stored entries in ascending
    column order, which keeps the result deterministic."""
    d = as_dense(d)
    if s.shape[1] != d.shape[0]:
        raise ValueError(f"dimension mismatch: {s.shape} @ {d.shape}")
    return np.ascontiguousarray(s @ d)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = as_dense(a), as_dense(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def transpose(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(as_dense(a).T)


def relu(a: np.ndarray) -> np.ndarray:
    return np.maximum(as_dense(a), 0.0)


def relu_mask_backward(upstream: np.ndarray, pre_activation: np.ndarray) -> np.ndarray:
    """Zero the upstream gradient wherever the pre-activation was <= 0.

    The subgradient at exactly 0 is taken as 0.
    """
    upstream, pre_activation = as_dense(upstream), as_dense(pre_activation)
    if upstream.shape != pre_activation.shape:
        raise ValueError(
            f"dimension mismatch: {upstream.shape} vs {pre_activation.shape}"
        )
    return np.where(pre_activation > 0.0, upstream, 0.0)


def dense_bytes(m: np.ndarray) -> bytes:
    """Snapshot encoding: magic tag, dims, then the row-major payload."""
    m = as_dense(m)
    header = struct.pack("<qq", m.shape[0], m.shape[1])
    return DENSE_MAGIC + header + m.astype("<f8").tobytes(order="C")


def dense_from_bytes(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    """Decode one snapshot starting at `offset`; returns (matrix, next offset)."""
    if buf[offset:offset + len(DENSE_MAGIC)] != DENSE_MAGIC:
        raise ValueError("bad matrix snapshot: magic tag missing")
    offset += len(DENSE_MAGIC)
    rows, cols = struct.unpack_from("<qq", buf, offset)
    offset += 16
    if rows < 0 or cols < 0:
        raise ValueError("bad matrix snapshot: negative dimensions")
    count = rows * cols
    data = np.frombuffer(buf, dtype="<f8", count=count, offset=offset)
    offset += count * 8
    return np.ascontiguousarray(data.reshape(rows, cols)), offset


def save_dense(path, m: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(dense_bytes(m))


def load_dense(path) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    m, end = dense_from_bytes(buf)
    if end != len(buf):
        raise ValueError("bad matrix snapshot: trailing bytes")
    return m
