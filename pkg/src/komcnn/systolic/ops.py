"""Cycle-accurate FIR, matrix-multiply, convolution, pooling and FC runs.

Every multiply-accumulate workload is lowered to the same primitive: a bank
of weight-stationary MAC chains, one per weight row, through which a stream
of partial-sum tokens flows.  Token ``j`` enters the left edge at cycle
``j`` and meets cell ``k`` at cycle ``j + k``, so cell ``k`` is fed the
``k``-th element of column ``j`` with a ``k``-cycle skew.  The result for
token ``j`` is visible at the right edge at cycle ``j + L`` (``L`` cells).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .cell import SystolicArray, check_acc
from .tensor import Tensor


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ChainRun:
    """Outputs ``out[i][j]`` = dot(weight row i, column j), plus accounting."""

    out: list[list[int]]
    cycles: int
    multiplications: int
    latency: int


def stream_dot_products(weight_rows: Sequence[Sequence[int]],
                        columns: Sequence[Sequence[int]]) -> ChainRun:
    """Run every column through one MAC chain per weight row."""
    if not weight_rows or not columns:
        raise ShapeError("need at least one weight row and one column")
    length = len(weight_rows[0])
    if length == 0 or any(len(r) != length for r in weight_rows):
        raise ShapeError("weight rows must share one non-zero length")
    if any(len(c) != length for c in columns):
        raise ShapeError(f"columns must have length {length}")
    chains = [SystolicArray.from_weights(r) for r in weight_rows]
    n_tok = len(columns)
    out = [[0] * n_tok for _ in weight_rows]
    total = n_tok + length - 1
    for cycle in range(total):
        # Skewed feed: cell k sees element k of the token that entered at cycle - k.
        xs = []
        for k in range(length):
            j = cycle - k
            xs.append(columns[j][k] if 0 <= j < n_tok else 0)
        inject = cycle < n_tok
        for i, chain in enumerate(chains):
            y, valid = chain.clock(xs, inject)
            if valid:
                # Token j leaves the last cell at the end of cycle j + length - 1.
                out[i][cycle - length + 1] = y
    return ChainRun(out, total, sum(c.multiplications for c in chains), length)


# -- FIR ---------------------------------------------------------------------

@dataclass(frozen=True)
class FirRun:
    outputs: list[int]
    latency: int
    cycles: int
    multiplications: int


def run_fir(h: Sequence[int], x: Sequence[int]) -> FirRun:
    """``y[n] = sum_k h[k] * x[n-k]`` on a K-cell chain.

    Cell ``j`` holds tap ``h[K-1-j]``.  All cells see the same input sample,
    delayed ``K-1`` cycles by an input shift register, and a new partial sum
    starts at the left edge every cycle.  Sample ``x[0]`` enters at cycle 0
    and ``y[n]`` is visible at the right edge at cycle ``n + K``.
    """
    if len(h) == 0:
        raise ShapeError("FIR needs at least one coefficient")
    if len(x) == 0:
        raise ShapeError("FIR needs at least one input sample")
    taps = len(h)
    chain = SystolicArray.from_weights(list(reversed(h)))
    delay_line = [0] * (taps - 1)
    outputs: list[int] = []
    first_valid = None
    n = len(x)
    cycle = 0
    while len(outputs) < n:
        sample = x[cycle] if cycle < n else 0
        delay_line.append(sample)
        delayed = delay_line.pop(0)
        y, valid = chain.clock([delayed] * taps, inject=cycle < n)
        cycle += 1
        if valid:
            if first_valid is None:
                first_valid = cycle
            outputs.append(y)
    return FirRun(outputs, first_valid, cycle, chain.multiplications)


def fir_oracle(h: Sequence[int], x: Sequence[int]) -> list[int]:
    return [sum(h[k] * x[i - k] for k in range(len(h)) if i - k >= 0) for i in range(len(x))]


# -- matrix multiply -----------------------------------------------------------

@dataclass(frozen=True)
class MatmulRun:
    product: list[list[int]]
    multiplications: int
    cycles: int


def _square(m: Sequence[Sequence[int]], label: str) -> int:
    n = len(m)
    if n == 0 or any(len(r) != n for r in m):
        raise ShapeError(f"{label} must be a non-empty square matrix")
    return n


def run_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> MatmulRun:
    """``C = A @ B``: chain ``i`` holds row ``i`` of A, token ``j`` carries
    column ``j`` of B."""
    n = _square(a, "A")
    if _square(b, "B") != n:
        raise ShapeError(f"order mismatch: A is {n}x{n}, B is {len(b)}x{len(b)}")
    columns = [[b[k][j] for k in range(n)] for j in range(n)]
    run = stream_dot_products(a, columns)
    return MatmulRun(run.out, run.multiplications, run.cycles)


def matmul_oracle(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


# -- 2D convolution --------------------------------------------------------------

def im2col(image: Tensor, kh: int, kw: int) -> list[list[int]]:
    """One column per output position, each holding the ``kh*kw*C`` window
    values in the kernel's own row-major, channel-last order."""
    h_out = image.height - kh + 1
    w_out = image.width - kw + 1
    return [
        [image[r + dr, c + dc, ch] for dr in range(kh) for dc in range(kw) for ch in range(image.channels)]
        for r in range(h_out) for c in range(w_out)
    ]


@dataclass(frozen=True)
class ConvRun:
    feature_map: Tensor
    multiplications: int
    cycles: int


def run_conv2d(image: Tensor, kernel: Tensor) -> ConvRun:
    """Stride-1, unpadded cross-correlation producing one output channel."""
    if kernel.channels != image.channels:
        raise ShapeError(f"channel mismatch: image has {image.channels}, kernel has {kernel.channels}")
    if kernel.height > image.height or kernel.width > image.width:
        raise ShapeError(f"kernel {kernel.dims[:2]} larger than image {image.dims[:2]}")
    columns = im2col(image, kernel.height, kernel.width)
    run = stream_dot_products([list(kernel.data)], columns)
    h_out = image.height - kernel.height + 1
    w_out = image.width - kernel.width + 1
    return ConvRun(Tensor((h_out, w_out, 1), run.out[0]), run.multiplications, run.cycles)


def conv2d_oracle(image: Tensor, kernel: Tensor) -> Tensor:
    h_out = image.height - kernel.height + 1
    w_out = image.width - kernel.width + 1
    data = []
    for r in range(h_out):
        for c in range(w_out):
            acc = 0
            for dr in range(kernel.height):
                for dc in range(kernel.width):
                    for ch in range(image.channels):
                        acc += image[r + dr, c + dc, ch] * kernel[dr, dc, ch]
            data.append(acc)
    return Tensor((h_out, w_out, 1), data)


# -- pooling -------------------------------------------------------------------

class PoolMode(str, enum.Enum):
    MAX = "max"
    AVG = "avg"


def run_pool(fmap: Tensor, window: tuple[int, int], mode: PoolMode | str) -> Tensor:
    """Non-overlapping max or floor-average pooling of a single-channel map."""
    mode = PoolMode(mode)
    ph, pw = window
    if ph < 1 or pw < 1:
        raise ShapeError("pool window extents must be positive")
    if fmap.channels != 1:
        raise ShapeError(f"pooling expects one channel, got {fmap.channels}")
    if fmap.height % ph or fmap.width % pw:
        raise ShapeError(f"{fmap.height}x{fmap.width} map is not divisible by a {ph}x{pw} window")
    rows = fmap.to_rows()
    out = []
    for r in range(0, fmap.height, ph):
        row = []
        for c in range(0, fmap.width, pw):
            vals = [rows[r + i][c + j] for i in range(ph) for j in range(pw)]
            row.append(max(vals) if mode is PoolMode.MAX else sum(vals) // len(vals))
        out.append(row)
    return Tensor.from_rows(out)


# -- fully connected -------------------------------------------------------------

class Activation(str, enum.Enum):
    RELU = "relu"
    IDENTITY = "identity"


def run_fc(weights: Sequence[Sequence[int]], x: Sequence[int], bias: Sequence[int],
           activation: Activation | str = Activation.RELU) -> list[int]:
    """``activation(W @ x + b)`` with one MAC chain per output neuron."""
    activation = Activation(activation)
    m = len(weights)
    if m == 0:
        raise ShapeError("FC needs at least one weight row")
    d = len(x)
    if any(len(r) != d for r in weights):
        raise ShapeError(f"weight rows must have length {d} to match the input")
    if len(bias) != m:
        raise ShapeError(f"bias has {len(bias)} entries, expected {m}")
    run = stream_dot_products(weights, [list(x)])
    out = [check_acc(run.out[i][0] + bias[i], "bias add") for i in range(m)]
    if activation is Activation.RELU:
        out = [max(0, v) for v in out]
    return out
