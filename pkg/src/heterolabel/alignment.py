"""Distance matrices and monotonic hard alignment between tokens and frames.

Alignments are numpy integer arrays of length ``n_frames`` whose entry ``j``
is the 0-based token index that frame ``j`` belongs to. A valid alignment
starts at token 0, ends at token ``n_tokens - 1``, never decreases, and
steps by at most one, so every token owns at least one frame.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DimMismatch, TooFewFrames


def _as_matrix(x, name):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {x.shape}")
    return np.ascontiguousarray(x)


def compute_distance_matrix(token_encs, frame_encs) -> np.ndarray:
    """L2 distance between every token encoding and every frame encoding.

    Inputs may be float32; the result is float64 with shape (N, M).
    """
    a = _as_matrix(token_encs, "token_encs")
    b = _as_matrix(frame_encs, "frame_encs")
    if a.shape[1] != b.shape[1]:
        raise DimMismatch(f"token dim {a.shape[1]} != frame dim {b.shape[1]}")
    return _kernels.pairwise_l2(a, b)


def viterbi_align(dist) -> np.ndarray:
    """Minimum total-distance monotonic surjective alignment.

    Among equal-cost alignments the lexicographically smallest one wins,
    i.e. tokens advance as late as possible.
    """
    dist = _as_matrix(dist, "dist")
    n, m = dist.shape
    if m < n:
        raise TooFewFrames(n, m)
    return _kernels.viterbi(dist)


def alignment_cost(dist, align) -> float:
    dist = np.asarray(dist, dtype=np.float64)
    total = 0.0
    for j, i in enumerate(align):
        total += dist[i, j]
    return total


def soft_alignment(dist) -> np.ndarray:
    """Per-frame softmax over tokens of the negated distances."""
    dist = _as_matrix(dist, "dist")
    z = -dist
    z -= z.max(axis=0, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=0, keepdims=True)


def frames_per_token(align, n_tokens: int | None = None) -> np.ndarray:
    align = np.asarray(align)
    if n_tokens is None:
        n_tokens = int(align[-1]) + 1
    return np.bincount(align, minlength=n_tokens)


def is_valid_alignment(align, n_tokens: int) -> bool:
    align = np.asarray(align)
    if align.ndim != 1 or len(align) < n_tokens or len(align) == 0:
        return False
    steps = np.diff(align)
    return bool(align[0] == 0 and align[-1] == n_tokens - 1
                and np.all((steps == 0) | (steps == 1)))
