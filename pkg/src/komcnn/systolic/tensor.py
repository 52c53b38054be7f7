"""Integer tensors in row-major, channel-last order, plus their text format.

Text format: a header line ``H W C`` followed by ``H*W*C`` whitespace
separated integers.  Lines starting with ``#`` are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence


class TensorFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Tensor:
    dims: tuple[int, int, int]
    data: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise TensorFormatError(f"tensor extents must be three positive integers, got {self.dims}")
        data = tuple(int(v) for v in self.data)
        h, w, c = dims
        if len(data) != h * w * c:
            raise TensorFormatError(f"{h}x{w}x{c} tensor needs {h * w * c} values, got {len(data)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.dims[0]

    @property
    def width(self) -> int:
        return self.dims[1]

    @property
    def channels(self) -> int:
        return self.dims[2]

    def __getitem__(self, idx: tuple[int, int, int]) -> int:
        h, w, c = idx
        return self.data[(h * self.width + w) * self.channels + c]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Tensor":
        """Single-channel tensor from a list of rows."""
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise TensorFormatError("ragged rows")
        return cls((len(rows), width, 1), tuple(v for r in rows for v in r))

    @classmethod
    def vector(cls, values: Iterable[int]) -> "Tensor":
        values = tuple(values)
        return cls((1, len(values), 1), values)

    def to_rows(self) -> list[list[int]]:
        if self.channels != 1:
            raise TensorFormatError(f"to_rows needs one channel, tensor has {self.channels}")
        w = self.width
        return [list(self.data[r * w:(r + 1) * w]) for r in range(self.height)]

    def to_text(self) -> str:
        h, w, c = self.dims
        lines = [f"{h} {w} {c}"]
        row = w * c
        for r in range(h):
            lines.append(" ".join(str(v) for v in self.data[r * row:(r + 1) * row]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Tensor":
        tokens = []
        for line in text.splitlines():
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
        if len(tokens) < 3:
            raise TensorFormatError("missing 'H W C' header")
        try:
            values = [int(t, 0) for t in tokens]
        except ValueError as exc:
            raise TensorFormatError(f"non-integer token: {exc}") from None
        return cls(tuple(values[:3]), tuple(values[3:]))


def read_tensor(path: str | Path) -> Tensor:
    return Tensor.from_text(Path(path).read_text())


def write_tensor(tensor: Tensor, path: str | Path) -> None:
    Path(path).write_text(tensor.to_text())
