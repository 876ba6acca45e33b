"""Parameter containers for the temporal attention network."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, ValidationError


def _finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise ValidationError("non-finite parameter values", field=name)


@dataclass
class DilatedLayerParams:
    """Kernel-3 dilated convolution ``conv_w`` (3, D, D) and 1x1 projection ``proj_w`` (1, D, D)."""

    conv_w: np.ndarray
    conv_b: np.ndarray
    proj_w: np.ndarray
    proj_b: np.ndarray

    def __post_init__(self):
        D = self.conv_w.shape[-1]
        shapes = {"conv_w": (3, D, D), "conv_b": (D,), "proj_w": (1, D, D), "proj_b": (D,)}
        for name, shape in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")
            setattr(self, name, arr)

    @property
    def dim(self) -> int:
        return self.conv_w.shape[-1]

    def arrays(self):
        return {"conv_w": self.conv_w, "conv_b": self.conv_b, "proj_w": self.proj_w,
                "proj_b": self.proj_b}


@dataclass
class AttentionParams:
    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray

    def __post_init__(self):
        D = self.wq.shape[0]
        for name in ("wq", "wk", "wv", "wo"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (D, D):
                raise DimensionError(f"attention {name} has shape {arr.shape}, expected {(D, D)}")
            setattr(self, name, arr)

    def arrays(self):
        return {"wq": self.wq, "wk": self.wk, "wv": self.wv, "wo": self.wo}


@dataclass
class NetParams:
    """Dilated stack (layer ``l`` uses dilation ``2**l``), attention, and the 2D -> 2 head."""

    layers: list[DilatedLayerParams]
    attention: AttentionParams
    fc_w: np.ndarray
    fc_b: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.layers) < 1:
            raise ValidationError("at least one dilated layer required", field="layers")
        D = self.layers[0].dim
        for l, layer in enumerate(self.layers):
            if layer.dim != D:
                raise DimensionError(f"layer {l} has width {layer.dim}, expected {D}")
        if self.attention.wq.shape[0] != D:
            raise DimensionError("attention width differs from the dilated stack")
        self.fc_w = np.asarray(self.fc_w, dtype=float)
        self.fc_b = np.asarray(self.fc_b, dtype=float)
        if self.fc_w.shape != (2 * D, 2) or self.fc_b.shape != (2,):
            raise DimensionError(f"FC must be ({2 * D}, 2) + (2,), got {self.fc_w.shape} + {self.fc_b.shape}")

    @property
    def dim(self) -> int:
        return self.layers[0].dim

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def dilations(self) -> list[int]:
        return [2 ** l for l in range(self.num_layers)]

    def groups(self):
        """``(name, array)`` for every parameter array, in a fixed order.

        The arrays are the live storage, so in-place updates modify the net.
        """
        for l, layer in enumerate(self.layers):
            for name, arr in layer.arrays().items():
                yield f"layer{l}.{name}", arr
        for name, arr in self.attention.arrays().items():
            yield f"attention.{name}", arr
        yield "fc.w", self.fc_w
        yield "fc.b", self.fc_b

    def map(self, fn) -> "NetParams":
        """New params with ``fn`` applied to every array."""
        layers = [DilatedLayerParams(**{k: fn(v) for k, v in lp.arrays().items()})
                  for lp in self.layers]
        att = AttentionParams(**{k: fn(v) for k, v in self.attention.arrays().items()})
        return NetParams(layers, att, fn(self.fc_w), fn(self.fc_b), dict(self.meta))

    def copy(self) -> "NetParams":
        return self.map(np.copy)

    def zeros_like(self) -> "NetParams":
        return self.map(np.zeros_like)

    def validate(self):
        for name, arr in self.groups():
            _finite(name, arr)

    def to_obj(self) -> dict:
        return {
            "dim": self.dim,
            "layers": [{k: v.tolist() for k, v in lp.arrays().items()} for lp in self.layers],
            "attention": {k: v.tolist() for k, v in self.attention.arrays().items()},
            "fc_w": self.fc_w.tolist(),
            "fc_b": self.fc_b.tolist(),
            "meta": self.meta,
        }

    @classmethod
    def from_obj(cls, obj) -> "NetParams":
        layers = [DilatedLayerParams(**{k: np.asarray(v, float) for k, v in lp.items()})
                  for lp in obj["layers"]]
        att = AttentionParams(**{k: np.asarray(v, float) for k, v in obj["attention"].items()})
        p = cls(layers, att, np.asarray(obj["fc_w"], float), np.asarray(obj["fc_b"], float),
                dict(obj.get("meta", {})))
        p.validate()
        return p


def _uniform(rng, fan_in, shape):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_params(dim: int, num_layers: int = 4, rng=None) -> NetParams:
    """Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases zero."""
    rng = np.random.default_rng(rng)
    D = dim
    layers = [
        DilatedLayerParams(
            conv_w=_uniform(rng, 3 * D, (3, D, D)),
            conv_b=np.zeros(D),
            proj_w=_uniform(rng, D, (1, D, D)),
            proj_b=np.zeros(D),
        )
        for _ in range(num_layers)
    ]
    att = AttentionParams(*(_uniform(rng, D, (D, D)) for _ in range(4)))
    return NetParams(layers, att, _uniform(rng, 2 * D, (2 * D, 2)), np.zeros(2))
