"""Packing variable-length encoded posts into one set of row matrices.

Only unmasked rows are packed; each row carries the index of the post it
came from, and attention masks are built from those segment ids.  Masked
rows therefore never reach the model at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encoders import EncodedPost


@dataclass
class Batch:
    size: int
    text: np.ndarray         # [N_t x d_text]
    text_seg: np.ndarray     # [N_t]
    attr: np.ndarray         # [N_a x d_text]
    attr_seg: np.ndarray     # [N_a]
    attr_slot: np.ndarray    # [N_a] canonical class slot of each row
    regions: np.ndarray      # [N_v x d_vision]
    region_seg: np.ndarray   # [N_v]
    globals: np.ndarray      # [B x d_vision]
    labels: np.ndarray | None


def _gather(mats, masks, width):
    rows, seg, idx = [], [], []
    for i, (m, mask) in enumerate(zip(mats, masks)):
        keep = np.flatnonzero(mask)
        rows.append(m[keep])
        seg.append(np.full(len(keep), i, dtype=np.intp))
        idx.append(keep)
    if not rows:
        return np.zeros((0, width)), np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)
    return np.concatenate(rows).reshape(-1, width), np.concatenate(seg), np.concatenate(idx)


def pack(posts: Sequence[EncodedPost]) -> Batch:
    if not posts:
        raise ValueError("cannot pack an empty batch")
    d_text = posts[0].text.matrix.shape[1]
    d_vis = posts[0].vision.regions.shape[1]
    text, text_seg, _ = _gather([p.text.matrix for p in posts], [p.text.mask for p in posts], d_text)
    attr, attr_seg, attr_slot = _gather([p.attrs.matrix for p in posts], [p.attrs.mask for p in posts], d_text)
    regions, region_seg, _ = _gather([p.vision.regions for p in posts], [p.vision.mask for p in posts], d_vis)
    labels = None
    if all(p.label is not None for p in posts):
        labels = np.array([p.label for p in posts], dtype=np.intp)
    return Batch(
        size=len(posts),
        text=text, text_seg=text_seg,
        attr=attr, attr_seg=attr_seg, attr_slot=attr_slot,
        regions=regions, region_seg=region_seg,
        globals=np.stack([p.vision.global_vec for p in posts]),
        labels=labels,
    )
