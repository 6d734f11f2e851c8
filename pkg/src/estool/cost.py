"""FP32 operand counting and energy estimation for feed-forward networks.

Additions and multiplications are counted separately (never fused into
MACs) and normalization layers are excluded. Four consumer models are
supported:

* ``cnn2d`` / ``cnn3d`` -- one dense pass over the layer list.
* ``liaf``  -- dense synaptic counts repeated for each of T steps, plus
  per-neuron state updates (one add to integrate the drive, one multiply
  for the leak, per step).
* ``lif``   -- like ``liaf`` but the inputs of stepped layers are binary
  spikes: synaptic multiplications vanish and synaptic additions are
  scaled by the expected fire rate. Layers marked non-temporal (for
  example a classifier fed by rate-decoded activity) run once at full
  dense cost in either spiking model.

Residual merges are modeled as explicit ``add`` layers costing one
addition per output element. Energy uses per-operation constants of
1.273 pJ per FP32 addition and 3.483 pJ per FP32 multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

MODELS = ("cnn2d", "cnn3d", "lif", "liaf")
WEIGHTED_KINDS = ("conv2d", "conv3d", "linear")
LAYER_KINDS = WEIGHTED_KINDS + ("pool", "add")


class NetworkConfigError(ValueError):
    """Raised when a network description cannot be parsed or validated."""


@dataclass(frozen=True)
class OpCount:
    adds: float = 0.0
    mults: float = 0.0

    def __post_init__(self):
        if self.adds < 0 or self.mults < 0:
            raise ValueError("operand counts must be non-negative")

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.adds + other.adds, self.mults + other.mults)

    def scaled(self, adds_by: float = 1.0, mults_by: float = 1.0) -> "OpCount":
        return OpCount(self.adds * adds_by, self.mults * mults_by)


@dataclass(frozen=True)
class EnergyModel:
    e_add: float = 1.273   # pJ per FP32 addition
    e_mult: float = 3.483  # pJ per FP32 multiplication
    sparsity: float = 0.30

    def __post_init__(self):
        if self.e_add <= 0 or self.e_mult <= 0:
            raise ValueError("per-operation energies must be positive")
        if not 0.0 <= self.sparsity <= 1.0:
            raise ValueError("sparsity must be in [0, 1]")


@dataclass(frozen=True)
class LayerSpec:
    """Geometry of one network layer.

    `input_dims` are the spatial dims (h, w), or (d, h, w) for conv3d;
    linear layers use `in_channels`/`out_channels` as feature counts and
    leave the dims empty. `temporal` marks layers that run once per time
    step in the spiking models.
    """

    kind: str
    in_channels: int = 0
    out_channels: int = 0
    kernel: tuple[int, ...] = ()
    stride: tuple[int, ...] = ()
    padding: tuple[int, ...] = ()
    input_dims: tuple[int, ...] = ()
    bias: bool = False
    temporal: bool = True
    name: str = ""

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise NetworkConfigError(f"unknown layer kind {self.kind!r}")
        if self.kind in WEIGHTED_KINDS:
            if self.in_channels < 1 or self.out_channels < 1:
                raise NetworkConfigError(f"{self.kind} layer needs positive channel counts")
        if self.kind in ("conv2d", "conv3d"):
            want = 2 if self.kind == "conv2d" else 3
            for label, dims in (("kernel", self.kernel), ("input", self.input_dims)):
                if len(dims) != want or any(d < 1 for d in dims):
                    raise NetworkConfigError(
                        f"{self.kind} layer needs {want} positive {label} dims, got {dims}"
                    )
            if len(self.stride) != want:
                object.__setattr__(self, "stride", (1,) * want)
            if len(self.padding) != want:
                object.__setattr__(self, "padding", (0,) * want)

    @property
    def output_dims(self) -> tuple[int, ...]:
        if self.kind in ("conv2d", "conv3d", "pool") and self.kernel:
            dims = []
            stride = self.stride or (1,) * len(self.kernel)
            padding = self.padding or (0,) * len(self.kernel)
            for size, k, s, p in zip(self.input_dims, self.kernel, stride, padding):
                out = (size + 2 * p - k) // s + 1
                if out < 1:
                    raise NetworkConfigError(
                        f"layer {self.name or self.kind}: non-positive output dim "
                        f"(input {size}, kernel {k}, stride {s}, padding {p})"
                    )
                dims.append(out)
            return tuple(dims)
        return self.input_dims

    @property
    def output_volume(self) -> int:
        if self.kind == "linear":
            return self.out_channels
        return self.out_channels * math.prod(self.output_dims) if self.output_dims else self.out_channels


def count_layer(layer: LayerSpec) -> OpCount:
    """Dense FP32 operand count of one layer (one forward pass)."""
    if layer.kind == "linear":
        mults = layer.in_channels * layer.out_channels
        adds = (layer.in_channels - 1) * layer.out_channels
        if layer.bias:
            adds += layer.out_channels
        return OpCount(float(adds), float(mults))
    if layer.kind in ("conv2d", "conv3d"):
        volume = layer.output_volume
        taps = math.prod(layer.kernel) * layer.in_channels
        mults = taps * volume
        adds = (taps - 1 + (1 if layer.bias else 0)) * volume
        return OpCount(float(adds), float(mults))
    if layer.kind == "add":
        return OpCount(float(layer.output_volume), 0.0)
    return OpCount(0.0, 0.0)  # pool


@dataclass(frozen=True)
class LayerCount:
    """Per-layer report row: synaptic (weighted-sum) and state-update ops."""

    name: str
    kind: str
    synaptic: OpCount
    state: OpCount = field(default_factory=OpCount)

    @property
    def total(self) -> OpCount:
        return self.synaptic + self.state


def network_rows(
    net: list[LayerSpec], model: str, steps: int = 8, fire_rate: float = 0.30
) -> list[LayerCount]:
    """Per-layer operand counts for the given consumer model."""
    if model not in MODELS:
        raise NetworkConfigError(f"model must be one of {MODELS}, got {model!r}")
    if model in ("lif", "liaf") and steps < 1:
        raise NetworkConfigError(f"spiking models need steps >= 1, got {steps}")
    if not 0.0 <= fire_rate <= 1.0:
        raise NetworkConfigError(f"fire_rate must be in [0, 1], got {fire_rate}")

    rows = []
    for i, layer in enumerate(net):
        name = layer.name or f"{layer.kind}_{i}"
        dense = count_layer(layer)
        if model in ("cnn2d", "cnn3d"):
            rows.append(LayerCount(name, layer.kind, dense))
            continue
        if not layer.temporal:
            rows.append(LayerCount(name, layer.kind, dense))
            continue
        if layer.kind in WEIGHTED_KINDS:
            if model == "lif":
                # Binary spike inputs: no synaptic multiplications and only
                # the fire_rate fraction of additions actually happen.
                synaptic = dense.scaled(adds_by=fire_rate * steps, mults_by=0.0)
            else:
                synaptic = dense.scaled(steps, steps)
            neurons = float(layer.output_volume)
            state = OpCount(neurons * steps, neurons * steps)
            rows.append(LayerCount(name, layer.kind, synaptic, state))
        elif layer.kind == "add":
            # Residual merges act on membrane-domain values, full cost.
            rows.append(LayerCount(name, layer.kind, dense.scaled(steps, steps)))
        else:
            rows.append(LayerCount(name, layer.kind, dense))
    return rows


def count_network(
    net: list[LayerSpec], model: str, steps: int = 8, fire_rate: float = 0.30
) -> OpCount:
    """Total operand count of one prediction by the given consumer model."""
    total = OpCount()
    for row in network_rows(net, model, steps, fire_rate):
        total = total + row.total
    return total


def energy(ops: OpCount, em: EnergyModel | None = None) -> float:
    """Total energy in picojoules."""
    if em is None:
        em = EnergyModel()
    return ops.adds * em.e_add + ops.mults * em.e_mult


def power_per_frame(total_energy: float, frames_per_prediction: int) -> float:
    """Energy per consumed frame; spiking models pass their step count."""
    if frames_per_prediction < 1:
        raise ValueError(f"frames_per_prediction must be >= 1, got {frames_per_prediction}")
    return total_energy / frames_per_prediction


# ---------------------------------------------------------------------------
# Residual-network presets matching the published feature-dimension chains:
# 2-D:  1x224x224 -> 64x110x110 -> 64x55x55 -> 128x28x28 -> 256x14x14
#       -> 512x7x7 -> 512 -> 1000
# 3-D:  2x8x224x224 -> 64x8x110x110 -> 64x4x55x55 -> 128x2x28x28
#       -> 256x1x14x14 -> 512x1x7x7 -> 512 -> 1000
# Spiking presets share the 2-D geometry with two input channels and step
# through time until the classifier, which runs once on rate-decoded data.
# ---------------------------------------------------------------------------

PRESET_BLOCKS = {18: (2, 2, 2, 2), 34: (3, 4, 6, 3)}
STAGE_WIDTHS = (64, 128, 256, 512)


def _basic_block_2d(name, in_ch, out_ch, size_in, stride):
    size = (size_in + 2 - 3) // stride + 1
    layers = [
        LayerSpec("conv2d", in_ch, out_ch, (3, 3), (stride, stride), (1, 1),
                  (size_in, size_in), name=f"{name}.conv1"),
        LayerSpec("conv2d", out_ch, out_ch, (3, 3), (1, 1), (1, 1),
                  (size, size), name=f"{name}.conv2"),
    ]
    if stride != 1 or in_ch != out_ch:
        layers.append(LayerSpec("conv2d", in_ch, out_ch, (1, 1), (stride, stride), (0, 0),
                                (size_in, size_in), name=f"{name}.downsample"))
    layers.append(LayerSpec("add", out_channels=out_ch, input_dims=(size, size),
                            name=f"{name}.add"))
    return layers, size


def _basic_block_3d(name, in_ch, out_ch, dims_in, stride):
    dims = tuple((d + 2 - 3) // s + 1 for d, s in zip(dims_in, (stride,) * 3))
    layers = [
        LayerSpec("conv3d", in_ch, out_ch, (3, 3, 3), (stride,) * 3, (1, 1, 1),
                  dims_in, name=f"{name}.conv1"),
        LayerSpec("conv3d", out_ch, out_ch, (3, 3, 3), (1, 1, 1), (1, 1, 1),
                  dims, name=f"{name}.conv2"),
    ]
    if stride != 1 or in_ch != out_ch:
        layers.append(LayerSpec("conv3d", in_ch, out_ch, (1, 1, 1), (stride,) * 3,
                                (0, 0, 0), dims_in, name=f"{name}.downsample"))
    layers.append(LayerSpec("add", out_channels=out_ch, input_dims=dims,
                            name=f"{name}.add"))
    return layers, dims


def resnet_preset(depth: int, model: str) -> list[LayerSpec]:
    """Layer list of the ResNet-18/34 variant consumed by `model`."""
    if depth not in PRESET_BLOCKS:
        raise NetworkConfigError(f"no preset for depth {depth} (have {sorted(PRESET_BLOCKS)})")
    if model not in MODELS:
        raise NetworkConfigError(f"model must be one of {MODELS}, got {model!r}")
    blocks = PRESET_BLOCKS[depth]

    if model == "cnn3d":
        layers = [
            LayerSpec("conv3d", 2, 64, (3, 7, 7), (1, 2, 2), (1, 1, 1),
                      (8, 224, 224), name="conv1"),
            LayerSpec("pool", 64, 64, (3, 3, 3), (2, 2, 2), (1, 1, 1),
                      (8, 110, 110), name="maxpool"),
        ]
        dims = (4, 55, 55)
        in_ch = 64
        for stage, (width, count) in enumerate(zip(STAGE_WIDTHS, blocks), start=1):
            for b in range(count):
                stride = 2 if (stage > 1 and b == 0) else 1
                block, dims = _basic_block_3d(f"stage{stage}.{b}", in_ch, width, dims, stride)
                layers.extend(block)
                in_ch = width
        layers.append(LayerSpec("pool", 512, 512, (1, 7, 7), (1, 1, 1), (0, 0, 0),
                                dims, name="avgpool"))
        layers.append(LayerSpec("linear", 512, 1000, bias=True, name="fc"))
        return layers

    in_ch0 = 1 if model == "cnn2d" else 2
    layers = [
        LayerSpec("conv2d", in_ch0, 64, (7, 7), (2, 2), (1, 1), (224, 224), name="conv1"),
        LayerSpec("pool", 64, 64, (3, 3), (2, 2), (1, 1), (110, 110), name="maxpool"),
    ]
    size = 55
    in_ch = 64
    for stage, (width, count) in enumerate(zip(STAGE_WIDTHS, blocks), start=1):
        for b in range(count):
            stride = 2 if (stage > 1 and b == 0) else 1
            block, size = _basic_block_2d(f"stage{stage}.{b}", in_ch, width, size, stride)
            layers.extend(block)
            in_ch = width
    layers.append(LayerSpec("pool", 512, 512, (7, 7), (1, 1), (0, 0), (size, size),
                            name="avgpool"))
    if model in ("lif", "liaf"):
        layers.append(LayerSpec("pool", 512, 512, name="rate_decode", temporal=False))
        layers.append(LayerSpec("linear", 512, 1000, bias=True, temporal=False, name="fc"))
    else:
        layers.append(LayerSpec("linear", 512, 1000, bias=True, name="fc"))
    return layers


# ---------------------------------------------------------------------------
# Flat key=value network configs:
#     layer.<index>.kind = conv2d
#     layer.<index>.in_channels = 1
#     layer.<index>.out_channels = 64
#     layer.<index>.kernel = 7x7
#     layer.<index>.stride = 2x2
#     layer.<index>.padding = 1x1
#     layer.<index>.input = 224x224
#     layer.<index>.bias = true
#     layer.<index>.temporal = true
#     layer.<index>.name = conv1
# Dims accept 'x' or ',' separators; unknown keys are rejected.
# ---------------------------------------------------------------------------

_LAYER_FIELDS = {
    "kind", "in_channels", "out_channels", "kernel", "stride", "padding",
    "input", "bias", "temporal", "name",
}


def _parse_dims(value: str) -> tuple[int, ...]:
    parts = value.replace("x", ",").split(",")
    try:
        return tuple(int(p) for p in parts if p.strip())
    except ValueError:
        raise NetworkConfigError(f"bad dimension list {value!r}") from None


def _parse_bool(value: str) -> bool:
    if value.lower() in ("1", "true", "yes"):
        return True
    if value.lower() in ("0", "false", "no"):
        return False
    raise NetworkConfigError(f"bad boolean {value!r}")


def parse_network_config(text: str) -> list[LayerSpec]:
    """Parse a flat key=value network description into layer specs."""
    grouped: dict[int, dict[str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise NetworkConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "layer":
            raise NetworkConfigError(f"line {lineno}: key must look like layer.<i>.<field>")
        try:
            index = int(parts[1])
        except ValueError:
            raise NetworkConfigError(f"line {lineno}: bad layer index {parts[1]!r}") from None
        if parts[2] not in _LAYER_FIELDS:
            raise NetworkConfigError(f"line {lineno}: unknown field {parts[2]!r}")
        grouped.setdefault(index, {})[parts[2]] = value

    if not grouped:
        raise NetworkConfigError("no layers defined")
    layers = []
    for index in sorted(grouped):
        fields = grouped[index]
        if "kind" not in fields:
            raise NetworkConfigError(f"layer {index} has no kind")
        layers.append(LayerSpec(
            kind=fields["kind"],
            in_channels=int(fields.get("in_channels", 0)),
            out_channels=int(fields.get("out_channels", 0)),
            kernel=_parse_dims(fields["kernel"]) if "kernel" in fields else (),
            stride=_parse_dims(fields["stride"]) if "stride" in fields else (),
            padding=_parse_dims(fields["padding"]) if "padding" in fields else (),
            input_dims=_parse_dims(fields["input"]) if "input" in fields else (),
            bias=_parse_bool(fields.get("bias", "false")),
            temporal=_parse_bool(fields.get("temporal", "true")),
            name=fields.get("name", ""),
        ))
    return layers


def format_network_config(net: list[LayerSpec]) -> str:
    """Inverse of :func:`parse_network_config`."""
    lines = []
    for i, layer in enumerate(net):
        lines.append(f"layer.{i}.kind = {layer.kind}")
        if layer.in_channels:
            lines.append(f"layer.{i}.in_channels = {layer.in_channels}")
        if layer.out_channels:
            lines.append(f"layer.{i}.out_channels = {layer.out_channels}")
        for label, dims in (("kernel", layer.kernel), ("stride", layer.stride),
                            ("padding", layer.padding), ("input", layer.input_dims)):
            if dims:
                lines.append(f"layer.{i}.{label} = {'x'.join(str(d) for d in dims)}")
        lines.append(f"layer.{i}.bias = {'true' if layer.bias else 'false'}")
        lines.append(f"layer.{i}.temporal = {'true' if layer.temporal else 'false'}")
        if layer.name:
            lines.append(f"layer.{i}.name = {layer.name}")
        lines.append("")
    return "\n".join(lines)
