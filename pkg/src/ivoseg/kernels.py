"""Dense numeric kernels: row softmax, bilinear sampling, multi-head attention.

All kernels are pure functions over float32 numpy arrays.  Dot products and
row normalizations accumulate in float64 before the result is cast back, so
attention rows sum to 1 well within 1e-6.

Attention here is the scaled dot-product kind with the sharpness supplied as
an explicit ``temperature``.  Head projections are identity maps; heads
partition the query/key channels, each head computes its own weight matrix,
and the per-head readouts of the full value rows are averaged.  This keeps
every multi-head invariant (row normalization, convex-hull containment,
permutation symmetry) while allowing value widths that are not divisible by
the head count.

Per-head logits are the cosine of the head's sub-vectors over temperature.
The norm scaling matters: a channel partition of unit rows leaves the
sub-vectors unnormalized, and then a key with a heavy slice outscores a
query's own exact match (q.k can exceed q.q), which turns that head into a
constant readout of whichever keys carry the most mass.  Cosine keeps an
exact full-row match the argmax of every head, so small temperatures give
true nearest-neighbor retrieval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyMemoryError


@dataclass(frozen=True)
class SamplePoint:
    """Fractional pixel coordinate, origin top-left; x runs along width."""

    x: float
    y: float


def _require_finite(name: str, a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax of a 2-D array; shift-invariant and safe for large logits."""
    logits = np.asarray(logits, dtype=np.float32)
    if logits.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {logits.shape}")
    _require_finite("logits", logits)
    shifted = logits.astype(np.float64) - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return (e / e.sum(axis=1, keepdims=True)).astype(np.float32)


def bilinear_sample(feature_map: np.ndarray, p: SamplePoint) -> np.ndarray:
    """Sample one sub-pixel location from an H x W x C map, clamped to the border."""
    out = bilinear_sample_many(
        feature_map, np.asarray([p.x], np.float64), np.asarray([p.y], np.float64)
    )
    return out[0]


def bilinear_sample_many(feature_map: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized bilinear sampling; xs/ys are flat arrays of coordinates.

    Coordinates are clamped to [0, W-1] x [0, H-1] before interpolation, so
    out-of-range points read the nearest border texel.
    """
    fm = np.asarray(feature_map, dtype=np.float32)
    if fm.ndim == 2:
        fm = fm[:, :, None]
    if fm.ndim != 3 or fm.shape[0] < 1 or fm.shape[1] < 1:
        raise ValueError(f"expected a non-empty H x W x C map, got shape {feature_map.shape}")
    h, w, _ = fm.shape
    x = np.clip(np.asarray(xs, np.float64), 0.0, w - 1.0)
    y = np.clip(np.asarray(ys, np.float64), 0.0, h - 1.0)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (x - x0)[:, None]
    fy = (y - y0)[:, None]
    f = fm.astype(np.float64)
    top = f[y0, x0] * (1 - fx) + f[y0, x1] * fx
    bot = f[y1, x0] * (1 - fx) + f[y1, x1] * fx
    return (top * (1 - fy) + bot * fy).astype(np.float32)


def attention_weights(
    q: np.ndarray, k: np.ndarray, heads: int, temperature: float
) -> list[np.ndarray]:
    """Per-head softmax weight matrices (each Nq x Nk) for identity-projected heads."""
    q = np.asarray(q, dtype=np.float32)
    k = np.asarray(k, dtype=np.float32)
    if q.ndim != 2 or k.ndim != 2:
        raise ValueError("q and k must be 2-D")
    if k.shape[0] == 0:
        raise EmptyMemoryError("attention requires at least one key row")
    if q.shape[1] != k.shape[1]:
        raise ValueError(f"q/k channel mismatch: {q.shape[1]} != {k.shape[1]}")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    d = q.shape[1]
    if d % heads != 0:
        raise ValueError(f"channels ({d}) not divisible by heads ({heads})")
    _require_finite("q", q)
    _require_finite("k", k)
    dh = d // heads
    weights = []
    for h in range(heads):
        sl = slice(h * dh, (h + 1) * dh)
        qh = q[:, sl].astype(np.float64)
        kh = k[:, sl].astype(np.float64)
        qh = qh / np.maximum(np.linalg.norm(qh, axis=1, keepdims=True), 1e-8)
        kh = kh / np.maximum(np.linalg.norm(kh, axis=1, keepdims=True), 1e-8)
        logits = qh @ kh.T
        logits /= temperature
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        weights.append(e / e.sum(axis=1, keepdims=True))
    return weights


def multi_head_attention(
    q: np.ndarray,
    k: np.ndarray,
    v: np.ndarray,
    heads: int = 1,
    temperature: float = 0.05,
) -> np.ndarray:
    """Attention readout of value rows; output is Nq x Dv.

    Each head's weight matrix attends over the full value rows and the head
    readouts are averaged, so every output row is a convex combination of
    value rows regardless of Dv.
    """
    v = np.asarray(v, dtype=np.float32)
    if v.ndim != 2 or v.shape[0] != np.asarray(k).shape[0]:
        raise ValueError("v must be 2-D with one row per key row")
    _require_finite("v", v)
    ws = attention_weights(q, k, heads, temperature)
    # averaging the head outputs equals averaging the weight matrices first,
    # so the value readout is a single matmul regardless of head count
    mean_w = ws[0] if len(ws) == 1 else sum(ws) / len(ws)
    return (mean_w @ v.astype(np.float64)).astype(np.float32)


def attention_mac_count(nq: int, nk: int, d: int, dv: int, heads: int = 1) -> int:
    """Multiply-accumulate count of one attention pass.

    Logits cost nq*nk*d regardless of head count (heads partition d), and
    the value readout costs nq*nk*dv once because head weights are averaged
    before mixing.  ``heads`` is accepted so call sites document themselves
    but does not change the count.
    """
    del heads
    return nq * nk * d + nq * nk * dv
