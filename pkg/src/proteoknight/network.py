"""A compact dropout-capable convolutional classifier in plain numpy.

The network is small on purpose: a few 3x3 conv + 2x2 max-pool blocks, one
fully connected hidden layer, a single inverted-dropout layer on the hidden
activations, and a softmax output. Everything runs in float64 with explicit
forward/backward passes so gradients can be checked against finite
differences, and all randomness (init, shuffling, dropout masks) flows from
one seeded generator, making training bit-reproducible.

Dropout uses the inverted convention: kept activations are scaled by
1/(1-p) whenever masks are drawn, so dropout-off inference needs no
rescaling.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ModelError

_CHECKPOINT_MAGIC = b"PKNKMDL\x01"
_CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Architecture:
    input_size: int = 64
    channels: int = 3
    conv_filters: tuple[int, ...] = (8, 16, 32)  # 3x3 conv, pad 1, then 2x2 max pool
    hidden_units: int = 64
    n_classes: int = 2
    dropout: float = 0.2  # rate used while training

    def __post_init__(self):
        if self.input_size % (2 ** len(self.conv_filters)) != 0:
            raise ModelError("input_size must be divisible by 2 per conv block")
        if not 0.0 <= self.dropout < 1.0:
            raise ModelError("dropout rate must be in [0, 1)")
        if self.n_classes < 2:
            raise ModelError("need at least two classes")

    @property
    def flat_units(self) -> int:
        side = self.input_size // (2 ** len(self.conv_filters))
        return self.conv_filters[-1] * side * side


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 25
    batch_size: int = 32
    learning_rate: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1 or self.learning_rate < 0:
            raise ModelError("hyperparameters must be non-negative (batch >= 1)")


# ---------------------------------------------------------------------------
# Layer math (stride-1 pad-1 conv, 2x2 max pool, dense)
# ---------------------------------------------------------------------------

def _im2col(x: np.ndarray, k: int, pad: int) -> np.ndarray:
    """(B, C, H, W) -> (B, H, W, C*k*k) patch matrix for stride-1 conv."""
    b, c, h, w = x.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    s = xp.strides
    patches = np.lib.stride_tricks.as_strided(
        xp, shape=(b, c, k, k, h, w), strides=(s[0], s[1], s[2], s[3], s[2], s[3])
    )
    return np.ascontiguousarray(patches.transpose(0, 4, 5, 1, 2, 3)).reshape(
        b, h, w, c * k * k
    )


def _conv_forward(x, w, bias):
    b, c, h, wd = x.shape
    f = w.shape[0]
    k = w.shape[2]
    cols = _im2col(x, k, pad=k // 2)
    out = cols.reshape(-1, c * k * k) @ w.reshape(f, -1).T + bias
    out = out.reshape(b, h, wd, f).transpose(0, 3, 1, 2)
    return out, (cols, x.shape, w)


def _conv_backward(dout, cache):
    cols, x_shape, w = cache
    b, c, h, wd = x_shape
    f = w.shape[0]
    k = w.shape[2]
    pad = k // 2
    dout_r = dout.transpose(0, 2, 3, 1).reshape(-1, f)
    cols_r = cols.reshape(-1, c * k * k)
    dw = (dout_r.T @ cols_r).reshape(w.shape)
    db = dout_r.sum(axis=0)
    dcols = (dout_r @ w.reshape(f, -1)).reshape(b, h, wd, c, k, k)
    dcols = dcols.transpose(0, 3, 4, 5, 1, 2)  # (B, C, k, k, H, W)
    dxp = np.zeros((b, c, h + 2 * pad, wd + 2 * pad))
    for i in range(k):
        for j in range(k):
            dxp[:, :, i : i + h, j : j + wd] += dcols[:, :, i, j]
    return dxp[:, :, pad : pad + h, pad : pad + wd], dw, db


def _pool_forward(x):
    b, c, h, w = x.shape
    r = x.reshape(b, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    windows = r.reshape(b, c, h // 2, w // 2, 4)
    idx = windows.argmax(axis=-1)  # first max wins on ties
    out = np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]
    return out, (idx, x.shape)


def _pool_backward(dout, cache):
    idx, x_shape = cache
    b, c, h, w = x_shape
    dwin = np.zeros((b, c, h // 2, w // 2, 4))
    np.put_along_axis(dwin, idx[..., None], dout[..., None], axis=-1)
    return (
        dwin.reshape(b, c, h // 2, w // 2, 2, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(b, c, h, w)
    )


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------

class DropoutClassifier:
    """Conv blocks + hidden layer + inverted dropout + softmax head."""

    def __init__(self, arch: Architecture, params: dict[str, np.ndarray]):
        self.arch = arch
        self.params = params

    @classmethod
    def init(cls, arch: Architecture, seed: int = 0) -> "DropoutClassifier":
        """Seeded uniform fan-in init: U(-sqrt(1/fan_in), sqrt(1/fan_in))."""
        rng = np.random.default_rng(seed)
        params: dict[str, np.ndarray] = {}
        c_in = arch.channels
        for li, f in enumerate(arch.conv_filters):
            fan_in = c_in * 9
            limit = np.sqrt(1.0 / fan_in)
            params[f"conv{li}_w"] = rng.uniform(-limit, limit, size=(f, c_in, 3, 3))
            params[f"conv{li}_b"] = np.zeros(f)
            c_in = f
        limit = np.sqrt(1.0 / arch.flat_units)
        params["fc1_w"] = rng.uniform(-limit, limit, size=(arch.flat_units, arch.hidden_units))
        params["fc1_b"] = np.zeros(arch.hidden_units)
        limit = np.sqrt(1.0 / arch.hidden_units)
        params["fc2_w"] = rng.uniform(-limit, limit, size=(arch.hidden_units, arch.n_classes))
        params["fc2_b"] = np.zeros(arch.n_classes)
        return cls(arch, params)

    # -- forward ------------------------------------------------------------

    def _check_input(self, x: np.ndarray) -> None:
        expect = (self.arch.channels, self.arch.input_size, self.arch.input_size)
        if x.ndim != 4 or x.shape[1:] != expect:
            raise ModelError(f"input shape {x.shape} does not match (B, {expect})")

    def forward_features(self, x: np.ndarray, want_cache: bool = False):
        """Conv stack + hidden layer; returns post-ReLU hidden activations."""
        self._check_input(x)
        caches = []
        a = x
        for li in range(len(self.arch.conv_filters)):
            z, conv_cache = _conv_forward(
                a, self.params[f"conv{li}_w"], self.params[f"conv{li}_b"]
            )
            relu_mask = z > 0
            a, pool_cache = _pool_forward(z * relu_mask)
            caches.append((conv_cache, relu_mask, pool_cache))
        flat = a.reshape(a.shape[0], -1)
        z1 = flat @ self.params["fc1_w"] + self.params["fc1_b"]
        hidden_mask = z1 > 0
        hidden = z1 * hidden_mask
        if want_cache:
            return hidden, (caches, a.shape, flat, hidden_mask)
        return hidden

    def head_logits(self, hidden: np.ndarray) -> np.ndarray:
        return hidden @ self.params["fc2_w"] + self.params["fc2_b"]

    def predict_proba(
        self,
        x: np.ndarray,
        dropout_active: bool = False,
        p: float | None = None,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """Softmax probabilities for a batch; stochastic only if asked."""
        hidden = self.forward_features(x)
        if dropout_active:
            rate = self.arch.dropout if p is None else p
            hidden = hidden * _dropout_mask(
                rng if rng is not None else np.random.default_rng(0),
                hidden.shape,
                rate,
            )
        return _softmax(self.head_logits(hidden))

    def mc_predict_probs(
        self, image: np.ndarray, passes: int, p: float, rng: np.random.Generator
    ) -> np.ndarray:
        """(T, C) softmax outputs: one conv pass, T fresh hidden-layer masks."""
        hidden = self.forward_features(image[None])  # (1, hidden)
        if p == 0.0:
            # all masks are identity; replicate one pass so the rows are
            # bit-identical (row-blocked BLAS kernels need not be)
            row = _softmax(self.head_logits(hidden))
            return np.repeat(row, passes, axis=0)
        masks = _dropout_mask(rng, (passes, hidden.shape[1]), p)
        return _softmax(self.head_logits(hidden * masks))

    # -- loss / gradients ----------------------------------------------------

    def loss_and_grads(self, x, y, drop_mask: np.ndarray | None = None):
        """Mean cross-entropy and gradients for every parameter.

        ``drop_mask`` is an already-scaled inverted-dropout mask for the
        hidden layer (None disables dropout).
        """
        hidden, (caches, conv_out_shape, flat, hidden_mask) = self.forward_features(
            x, want_cache=True
        )
        h = hidden if drop_mask is None else hidden * drop_mask
        logits = self.head_logits(h)
        n = x.shape[0]
        logp = _log_softmax(logits)
        loss = -logp[np.arange(n), y].mean()

        grads: dict[str, np.ndarray] = {}
        dlogits = _softmax(logits)
        dlogits[np.arange(n), y] -= 1.0
        dlogits /= n
        grads["fc2_w"] = h.T @ dlogits
        grads["fc2_b"] = dlogits.sum(axis=0)
        dh = dlogits @ self.params["fc2_w"].T
        if drop_mask is not None:
            dh = dh * drop_mask
        dz1 = dh * hidden_mask
        grads["fc1_w"] = flat.T @ dz1
        grads["fc1_b"] = dz1.sum(axis=0)
        da = (dz1 @ self.params["fc1_w"].T).reshape(conv_out_shape)
        for li in reversed(range(len(self.arch.conv_filters))):
            conv_cache, relu_mask, pool_cache = caches[li]
            dz = _pool_backward(da, pool_cache) * relu_mask
            da, grads[f"conv{li}_w"], grads[f"conv{li}_b"] = _conv_backward(dz, conv_cache)
        return loss, grads

    def dataset_loss(self, x, y, batch_size: int = 256) -> float:
        total = 0.0
        for start in range(0, x.shape[0], batch_size):
            xb = x[start : start + batch_size]
            yb = y[start : start + batch_size]
            logp = _log_softmax(self.head_logits(self.forward_features(xb)))
            total += -logp[np.arange(xb.shape[0]), yb].sum()
        return total / x.shape[0]

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        """Write a versioned binary checkpoint (header JSON + raw float64)."""
        names = sorted(self.params)
        header = {
            "format_version": _CHECKPOINT_VERSION,
            "architecture": asdict(self.arch),
            "params": [
                {"name": n, "shape": list(self.params[n].shape)} for n in names
            ],
        }
        blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(_CHECKPOINT_MAGIC)
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)
            for n in names:
                fh.write(np.ascontiguousarray(self.params[n], dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "DropoutClassifier":
        with open(path, "rb") as fh:
            data = fh.read()
        if data[: len(_CHECKPOINT_MAGIC)] != _CHECKPOINT_MAGIC:
            raise ModelError(f"{path}: not a model checkpoint")
        off = len(_CHECKPOINT_MAGIC)
        (hlen,) = struct.unpack_from("<Q", data, off)
        off += 8
        header = json.loads(data[off : off + hlen].decode("utf-8"))
        off += hlen
        if header.get("format_version") != _CHECKPOINT_VERSION:
            raise ModelError(f"{path}: unsupported checkpoint version")
        arch_d = dict(header["architecture"])
        arch_d["conv_filters"] = tuple(arch_d["conv_filters"])
        arch = Architecture(**arch_d)
        params = {}
        for meta in header["params"]:
            shape = tuple(meta["shape"])
            count = int(np.prod(shape)) if shape else 1
            arr = np.frombuffer(data, dtype="<f8", count=count, offset=off)
            off += count * 8
            params[meta["name"]] = arr.reshape(shape).copy()
        return cls(arch, params)


def _dropout_mask(rng: np.random.Generator, shape, p: float) -> np.ndarray:
    """Inverted-dropout mask: Bernoulli(keep = 1-p) scaled by 1/(1-p)."""
    if not 0.0 <= p < 1.0:
        raise ModelError(f"dropout rate {p} outside [0, 1)")
    if p == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= p) / (1.0 - p)


def predict(
    model: DropoutClassifier,
    image: np.ndarray,
    dropout_active: bool = False,
    seed: int = 0,
    p: float | None = None,
) -> np.ndarray:
    """Softmax vector for one (C, H, W) image; deterministic when dropout is off."""
    probs = model.predict_proba(
        image[None], dropout_active=dropout_active, p=p, rng=np.random.default_rng(seed)
    )
    return probs[0]


def train(
    dataset: tuple[np.ndarray, np.ndarray],
    cfg: TrainConfig,
    arch: Architecture = Architecture(),
) -> tuple[DropoutClassifier, list[float]]:
    """Mini-batch SGD on cross-entropy with inverted dropout while training.

    Returns the trained model and the training-set loss history, where
    entry 0 is the loss before the first update. Divergence (non-finite
    loss) aborts with diagnostics.
    """
    x, y = dataset
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape[0] == 0:
        raise ModelError("training set is empty")
    if y.min() < 0 or y.max() >= arch.n_classes:
        raise ModelError(f"labels must be in 0..{arch.n_classes - 1}")

    rng = np.random.default_rng(cfg.seed)
    model = DropoutClassifier.init(arch, seed=cfg.seed)
    history = [model.dataset_loss(x, y)]
    n = x.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            mask = (
                _dropout_mask(rng, (batch.size, arch.hidden_units), arch.dropout)
                if arch.dropout > 0.0
                else None
            )
            loss, grads = model.loss_and_grads(x[batch], y[batch], drop_mask=mask)
            if not np.isfinite(loss):
                raise ModelError(
                    f"training diverged: non-finite loss at epoch {epoch}, "
                    f"batch offset {start} (learning_rate={cfg.learning_rate})"
                )
            for name, g in grads.items():
                model.params[name] -= cfg.learning_rate * g
        history.append(model.dataset_loss(x, y))
    return model, history


def downscale_mean(pixels: np.ndarray, target: int) -> np.ndarray:
    """Area-average an (H, W, 3) uint8 raster down to (target, target, 3) floats.

    The source side must be an integer multiple of ``target``.
    """
    h, w = pixels.shape[:2]
    if h != w or h % target != 0:
        raise ModelError(f"cannot area-average {h}x{w} down to {target}x{target}")
    f = h // target
    x = pixels.astype(np.float64) / 255.0
    return x.reshape(target, f, target, f, 3).mean(axis=(1, 3))


def image_to_input(pixels: np.ndarray, input_size: int) -> np.ndarray:
    """Raster -> (3, s, s) float64 network input in [0, 1]."""
    return downscale_mean(pixels, input_size).transpose(2, 0, 1)
