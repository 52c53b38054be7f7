"""Cycle-accurate model of a reconfigurable systolic MAC engine."""

from .cell import (
    ACC_BITS,
    ACC_MAX,
    ACC_MIN,
    AccumulatorOverflow,
    SystolicArray,
    SystolicCell,
    cell_step,
)
from .config import (
    ConfigurationError,
    ConfiguredEngine,
    EngineConfig,
    Instruction,
    Mode,
    RunStep,
    configure,
    execute,
    parse_script,
)
from .ops import (
    Activation,
    ChainRun,
    ConvRun,
    FirRun,
    MatmulRun,
    PoolMode,
    ShapeError,
    conv2d_oracle,
    fir_oracle,
    im2col,
    matmul_oracle,
    run_conv2d,
    run_fc,
    run_fir,
    run_matmul,
    run_pool,
    stream_dot_products,
)
from .tensor import Tensor, TensorFormatError, read_tensor, write_tensor

__all__ = [
    "ACC_BITS", "ACC_MAX", "ACC_MIN", "AccumulatorOverflow", "SystolicArray", "SystolicCell",
    "cell_step", "ConfigurationError", "ConfiguredEngine", "EngineConfig", "Instruction", "Mode",
    "RunStep", "configure", "execute", "parse_script", "Activation", "ChainRun", "ConvRun",
    "FirRun", "MatmulRun", "PoolMode", "ShapeError", "conv2d_oracle", "fir_oracle", "im2col",
    "matmul_oracle", "run_conv2d", "run_fc", "run_fir", "run_matmul", "run_pool",
    "stream_dot_products", "Tensor", "TensorFormatError", "read_tensor", "write_tensor",
]
