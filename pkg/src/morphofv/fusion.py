"""Attention-fused visual/textual classifier head, trained with plain SGD.

All layers and their gradients are written out explicitly over NumPy
arrays; there is no autograd involved.  The forward path: channel attention
over the visual map (1x1 conv + sigmoid, residual re-weighting, global
average pool), a visual projection, a textual projection of the Fisher
vector, a coordinate-wise soft attention gating the textual branch by the
visual one, concatenation and a softmax classifier.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

EPS_LOG = 1e-12


@dataclass(frozen=True)
class VisualInput:
    """Either a pooled feature vector or a channels-first spatial map."""

    pooled: np.ndarray | None = None
    spatial: np.ndarray | None = None

    def __post_init__(self):
        if (self.pooled is None) == (self.spatial is None):
            raise ValueError("exactly one of pooled or spatial must be set")
        if self.pooled is not None and np.asarray(self.pooled).ndim != 1:
            raise ValueError("pooled input must be 1-D")
        if self.spatial is not None and np.asarray(self.spatial).ndim != 3:
            raise ValueError("spatial input must be C x H x W")


@dataclass(frozen=True)
class FusionConfig:
    visual_dim: int  # channels of spatial maps == length of pooled vectors
    txt_in: int  # Fisher vector length (2*d*K)
    n_classes: int
    vis_out: int = 1024
    txt_out: int = 512
    use_text: bool = True

    @property
    def fused_dim(self) -> int:
        return self.vis_out + (self.txt_out if self.use_text else 0)


@dataclass
class FusionParams:
    att_w: np.ndarray  # (Dv,)   1x1 conv over channels
    att_b: np.ndarray  # ()
    vis_w: np.ndarray  # (vis_out, Dv)
    vis_b: np.ndarray  # (vis_out,)
    txt_w: np.ndarray  # (txt_out, txt_in)
    txt_b: np.ndarray  # (txt_out,)
    attv_w: np.ndarray  # (txt_out, vis_out)
    attv_b: np.ndarray  # (txt_out,)
    attt_w: np.ndarray  # (txt_out, txt_out)
    attt_b: np.ndarray  # (txt_out,)
    cls_w: np.ndarray  # (n_classes, fused_dim)
    cls_b: np.ndarray  # (n_classes,)

    def copy(self) -> "FusionParams":
        return FusionParams(**{f.name: getattr(self, f.name).copy() for f in fields(self)})

    def zeros_like(self) -> "FusionParams":
        return FusionParams(**{f.name: np.zeros_like(getattr(self, f.name)) for f in fields(self)})

    def tensors(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 64
    learning_rate: float = 0.001
    momentum: float = 0.9
    lr_decay: float = 0.1
    lr_decay_every: int = 10
    seed: int = 0

    def __post_init__(self):
        if min(self.epochs, self.batch_size) < 1 or self.learning_rate < 0:
            raise ValueError("invalid training configuration")
        if not 0.0 < self.lr_decay < 1.0:
            raise ValueError("lr_decay must lie in (0, 1)")


@dataclass(frozen=True)
class LabeledDataset:
    samples: list  # (id, VisualInput, fisher vector values, label)
    classes: list[str]

    def __post_init__(self):
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("duplicate class labels")
        ids = [s[0] for s in self.samples]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sample ids")
        known = set(self.classes)
        for sid, _, _, label in self.samples:
            if label not in known:
                raise ValueError(f"sample {sid!r} has unknown label {label!r}")

    def label_indices(self) -> np.ndarray:
        lookup = {c: i for i, c in enumerate(self.classes)}
        return np.array([lookup[s[3]] for s in self.samples], dtype=np.intp)


def _glorot(rng, shape):
    fan_out, fan_in = (shape if len(shape) == 2 else (1, shape[0]))
    a = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-a, a, size=shape)


def init_params(config: FusionConfig, seed: int = 0) -> FusionParams:
    rng = np.random.default_rng(seed)
    return FusionParams(
        att_w=_glorot(rng, (config.visual_dim,)),
        att_b=np.zeros(()),
        vis_w=_glorot(rng, (config.vis_out, config.visual_dim)),
        vis_b=np.zeros(config.vis_out),
        txt_w=_glorot(rng, (config.txt_out, config.txt_in)),
        txt_b=np.zeros(config.txt_out),
        attv_w=_glorot(rng, (config.txt_out, config.vis_out)),
        attv_b=np.zeros(config.txt_out),
        attt_w=_glorot(rng, (config.txt_out, config.txt_out)),
        attt_b=np.zeros(config.txt_out),
        cls_w=_glorot(rng, (config.n_classes, config.fused_dim)),
        cls_b=np.zeros(config.n_classes),
    )


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _softmax_rows(z):
    e = np.exp(z - np.max(z, axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _pool_visual(vis: VisualInput, params: FusionParams):
    """Attended global-average-pooled channel vector plus the intermediates
    needed for the backward pass (None for pooled inputs)."""
    if vis.pooled is not None:
        return np.asarray(vis.pooled, dtype=np.float64), None
    x = np.asarray(vis.spatial, dtype=np.float64)
    if x.shape[0] != params.att_w.shape[0]:
        raise ValueError(f"spatial map has {x.shape[0]} channels, expected {params.att_w.shape[0]}")
    att = _sigmoid(np.tensordot(params.att_w, x, axes=(0, 0)) + params.att_b)
    weighted = x * (1.0 + att)[None, :, :]
    g = weighted.mean(axis=(1, 2))
    return g, (x, att)


def forward_trace(vis: VisualInput, fv_values, params: FusionParams, config: FusionConfig):
    """Forward pass keeping every intermediate, for backprop and inspection."""
    g, att_ctx = _pool_visual(vis, params)
    v = params.vis_w @ g + params.vis_b
    if config.use_text:
        f = np.asarray(fv_values, dtype=np.float64)
        t = params.txt_w @ f + params.txt_b
        s = np.tanh(params.attv_w @ v + params.attv_b + params.attt_w @ t + params.attt_b)
        wa = _softmax_rows(s)
        tfa = wa * t
        fused = np.concatenate([v, tfa])
    else:
        f = t = s = wa = tfa = None
        fused = v
    logits = params.cls_w @ fused + params.cls_b
    probs = _softmax_rows(logits)
    return {
        "g": g, "att_ctx": att_ctx, "v": v, "f": f, "t": t, "s": s,
        "wa": wa, "tfa": tfa, "fused": fused, "logits": logits, "probs": probs,
    }


def visual_attend(vis: VisualInput, params: FusionParams) -> np.ndarray:
    """Attention-weighted pooled visual feature after projection."""
    g, _ = _pool_visual(vis, params)
    return params.vis_w @ g + params.vis_b


def textual_attend(v: np.ndarray, t: np.ndarray, params: FusionParams) -> np.ndarray:
    """Soft attention over the projected textual feature coordinates."""
    s = np.tanh(params.attv_w @ v + params.attv_b + params.attt_w @ t + params.attt_b)
    return _softmax_rows(s) * t


def forward(vis: VisualInput, fv_values, params: FusionParams, config: FusionConfig) -> np.ndarray:
    return forward_trace(vis, fv_values, params, config)["probs"]


def loss(probs: np.ndarray, label_index: int) -> float:
    """Cross entropy of one prediction; probabilities clamped away from 0."""
    return float(-np.log(max(float(probs[label_index]), EPS_LOG)))


def batch_loss(batch, params: FusionParams, config: FusionConfig) -> float:
    """Mean cross entropy over (VisualInput, fv, label_index) triples."""
    total = 0.0
    for vis, fv_values, y in batch:
        total += loss(forward(vis, fv_values, params, config), y)
    return total / len(batch)


def backward(batch, params: FusionParams, config: FusionConfig):
    """Mean loss, gradients and per-sample correctness for one mini-batch.

    Gradients are exact derivatives of the mean cross entropy with respect
    to every parameter tensor.  Dense-layer gradients are accumulated with
    batch-level matrix products; the spatial attention part is handled per
    sample because map shapes may differ.
    """
    b = len(batch)
    if b == 0:
        raise ValueError("empty batch")
    traces = [forward_trace(vis, fv_values, params, config) for vis, fv_values, _ in batch]
    labels = np.array([y for _, _, y in batch], dtype=np.intp)

    probs = np.stack([tr["probs"] for tr in traces])
    fused = np.stack([tr["fused"] for tr in traces])
    vmat = np.stack([tr["v"] for tr in traces])
    gmat = np.stack([tr["g"] for tr in traces])

    total_loss = float(np.mean(-np.log(np.maximum(probs[np.arange(b), labels], EPS_LOG))))
    correct = int(np.sum(np.argmax(probs, axis=1) == labels))

    grads = params.zeros_like()
    dz = probs.copy()
    dz[np.arange(b), labels] -= 1.0
    dz /= b

    grads.cls_w[:] = dz.T @ fused
    grads.cls_b[:] = dz.sum(axis=0)
    dfused = dz @ params.cls_w

    dv = dfused[:, : config.vis_out].copy()
    if config.use_text:
        fmat = np.stack([tr["f"] for tr in traces])
        tmat = np.stack([tr["t"] for tr in traces])
        smat = np.stack([tr["s"] for tr in traces])
        wmat = np.stack([tr["wa"] for tr in traces])

        dtfa = dfused[:, config.vis_out :]
        dwa = dtfa * tmat
        dt = dtfa * wmat
        ds = wmat * (dwa - np.sum(dwa * wmat, axis=1, keepdims=True))
        dpre = ds * (1.0 - smat * smat)

        grads.attv_w[:] = dpre.T @ vmat
        grads.attv_b[:] = dpre.sum(axis=0)
        grads.attt_w[:] = dpre.T @ tmat
        grads.attt_b[:] = dpre.sum(axis=0)
        dv += dpre @ params.attv_w
        dt += dpre @ params.attt_w

        grads.txt_w[:] = dt.T @ fmat
        grads.txt_b[:] = dt.sum(axis=0)

    grads.vis_w[:] = dv.T @ gmat
    grads.vis_b[:] = dv.sum(axis=0)
    dg = dv @ params.vis_w

    for i, tr in enumerate(traces):
        if tr["att_ctx"] is None:
            continue
        x, att = tr["att_ctx"]
        hw = x.shape[1] * x.shape[2]
        datt = np.tensordot(dg[i], x, axes=(0, 0)) / hw
        dpre_att = datt * att * (1.0 - att)
        grads.att_w += np.tensordot(x, dpre_att, axes=((1, 2), (0, 1)))
        grads.att_b += dpre_att.sum()

    return total_loss, grads, correct


def train(dataset: LabeledDataset, fusion_config: FusionConfig, config: TrainConfig,
          init_seed: int | None = None):
    """Mini-batch SGD with momentum and stepwise learning-rate decay.

    Returns the trained parameters and one metrics row per epoch
    (epoch, loss, accuracy).  Fully deterministic for fixed seeds.
    """
    if not dataset.samples:
        raise ValueError("dataset is empty")
    params = init_params(fusion_config, config.seed if init_seed is None else init_seed)
    labels = dataset.label_indices()
    triples = [(vis, fv, int(labels[i])) for i, (_, vis, fv, _) in enumerate(dataset.samples)]

    rng = np.random.default_rng(config.seed)
    velocity = params.zeros_like()
    history = []
    n = len(triples)
    for epoch in range(config.epochs):
        lr = config.learning_rate * config.lr_decay ** (epoch // config.lr_decay_every)
        order = rng.permutation(n)
        epoch_loss = 0.0
        epoch_correct = 0
        for start in range(0, n, config.batch_size):
            batch = [triples[j] for j in order[start : start + config.batch_size]]
            bloss, grads, correct = backward(batch, params, fusion_config)
            if not np.isfinite(bloss):
                raise RuntimeError(f"non-finite loss {bloss} at epoch {epoch}")
            epoch_loss += bloss * len(batch)
            epoch_correct += correct
            for name, tensor in params.tensors().items():
                vel = getattr(velocity, name)
                vel *= config.momentum
                vel += getattr(grads, name)
                tensor -= lr * vel
        history.append({
            "epoch": epoch,
            "loss": epoch_loss / n,
            "accuracy": epoch_correct / n,
        })
    return params, history
