"""Network architecture descriptors."""

from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

HEADS = ("acc", "sa")
HEAD_OUTPUTS = ("mu_raw", "sigma_raw", "value")

# Fixed scalar scaling: target speed, current speed, speed ratio,
# last curvature (tan(0.2) / 2.8 ~ 0.072 1/m), last acceleration.
DEFAULT_SCALAR_SCALE = (0.12, 0.12, 1.0, 14.0, 0.5)


class ConvSpec(BaseModel):
    """One convolution: filters, square kernel, stride."""

    model_config = ConfigDict(frozen=True)

    filters: int = Field(ge=1)
    kernel: int = Field(ge=1)
    stride: int = Field(ge=1)


class NetArchitecture(BaseModel):
    """Shape of one policy head (both heads are identical and unshared)."""

    model_config = ConfigDict(frozen=True)

    grid_size: int = Field(default=84, ge=1)
    in_planes: int = Field(default=16, ge=1)
    n_scalars: int = Field(default=5, ge=0)
    conv: Tuple[ConvSpec, ...] = (
        ConvSpec(filters=16, kernel=8, stride=4),
        ConvSpec(filters=32, kernel=4, stride=2),
        ConvSpec(filters=32, kernel=3, stride=1),
    )
    hidden: int = Field(default=256, ge=1)
    scalar_scale: Tuple[float, ...] = DEFAULT_SCALAR_SCALE

    @model_validator(mode="after")
    def _check(self) -> "NetArchitecture":
        if len(self.scalar_scale) != self.n_scalars:
            raise ValueError("scalar_scale needs one entry per scalar")
        size = self.grid_size
        for spec in self.conv:
            if size < spec.kernel:
                raise ValueError(f"kernel {spec.kernel} larger than input {size}")
            size = (size - spec.kernel) // spec.stride + 1
        return self

    def conv_sizes(self) -> List[int]:
        """Spatial size after each convolution."""
        sizes = []
        size = self.grid_size
        for spec in self.conv:
            size = (size - spec.kernel) // spec.stride + 1
            sizes.append(size)
        return sizes

    @property
    def flat_size(self) -> int:
        last = self.conv_sizes()[-1] if self.conv else self.grid_size
        channels = self.conv[-1].filters if self.conv else self.in_planes
        return channels * last * last

    def head_shapes(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """(name, shape) of every array in one head, in storage order."""
        shapes: List[Tuple[str, Tuple[int, ...]]] = []
        channels = self.in_planes
        for i, spec in enumerate(self.conv, start=1):
            kernel = (spec.filters, channels, spec.kernel, spec.kernel)
            shapes.append((f"conv{i}.w", kernel))
            shapes.append((f"conv{i}.b", (spec.filters,)))
            channels = spec.filters
        shapes.append(("fc.w", (self.hidden, self.flat_size + self.n_scalars)))
        shapes.append(("fc.b", (self.hidden,)))
        shapes.append(("out.w", (len(HEAD_OUTPUTS), self.hidden)))
        shapes.append(("out.b", (len(HEAD_OUTPUTS),)))
        return shapes

    def shapes(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """All arrays of the network, head by head."""
        return [
            (f"{head}.{name}", shape)
            for head in HEADS
            for name, shape in self.head_shapes()
        ]

    def param_count(self) -> int:
        total = 0
        for _, shape in self.shapes():
            count = 1
            for dim in shape:
                count *= dim
            total += count
        return total


def default_architecture() -> NetArchitecture:
    return NetArchitecture()


def tiny_architecture() -> NetArchitecture:
    """Reduced network for gradient checks and fast tests (14x14 input, 2 planes)."""
    return NetArchitecture(
        grid_size=14,
        in_planes=2,
        conv=(
            ConvSpec(filters=3, kernel=4, stride=2),
            ConvSpec(filters=4, kernel=3, stride=1),
            ConvSpec(filters=4, kernel=2, stride=1),
        ),
        hidden=8,
    )


SMALL_CONV = (
    ConvSpec(filters=8, kernel=4, stride=2),
    ConvSpec(filters=8, kernel=3, stride=2),
    ConvSpec(filters=8, kernel=3, stride=1),
)


def build_architecture(preset: str, grid_size: int, in_planes: int) -> NetArchitecture:
    """
    Architecture for a raster of ``grid_size`` cells and ``in_planes`` planes.

    Presets: ``default`` (16x8x8/4, 32x4x4/2, 32x3x3/1, dense 256) and
    ``small`` (8x4x4/2, 8x3x3/2, 8x3x3/1, dense 32) for quick runs.
    """
    if preset == "default":
        return NetArchitecture(grid_size=grid_size, in_planes=in_planes)
    if preset == "small":
        return NetArchitecture(
            grid_size=grid_size, in_planes=in_planes, conv=SMALL_CONV, hidden=32
        )
    raise ValueError(f"Unknown network preset: '{preset}'. Available: default, small")
