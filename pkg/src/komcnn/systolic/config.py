"""Configuration programs for the reconfigurable engine.

A program is a line-oriented script::

    SET_MODE CONV2D
    SET_PARAMS kh=3 kw=3 c=3
    LOAD_WEIGHTS 1 1 1 ...
    RUN

``SET_PARAMS`` takes ``key=value`` pairs; values are integers, comma
separated integer lists (``bias=1,-2``) or bare words (``activation=identity``).
Each ``RUN`` snapshots the mode, parameters and weights at that point.
:func:`execute` feeds the input tensor to the first run and each run's
output to the next one, so a script can describe a small layer stack.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .ops import Activation, PoolMode, run_conv2d, run_fc, run_fir, run_matmul, run_pool
from .tensor import Tensor


class ConfigurationError(ValueError):
    pass


class Mode(str, enum.Enum):
    CONV1D = "CONV1D"
    CONV2D = "CONV2D"
    MATMUL = "MATMUL"
    POOL_MAX = "POOL_MAX"
    POOL_AVG = "POOL_AVG"
    FC = "FC"


# Required integer extents per mode, and the optional extras it accepts.
_REQUIRED: dict[Mode, tuple[str, ...]] = {
    Mode.CONV1D: ("k",),
    Mode.CONV2D: ("kh", "kw", "c"),
    Mode.MATMUL: ("n",),
    Mode.POOL_MAX: ("ph", "pw"),
    Mode.POOL_AVG: ("ph", "pw"),
    Mode.FC: ("m", "d"),
}
_OPTIONAL: dict[Mode, tuple[str, ...]] = {Mode.FC: ("bias", "activation")}


def weight_count(mode: Mode, params: Mapping[str, Any]) -> int:
    if mode is Mode.CONV1D:
        return params["k"]
    if mode is Mode.CONV2D:
        return params["kh"] * params["kw"] * params["c"]
    if mode is Mode.MATMUL:
        return params["n"] ** 2
    if mode is Mode.FC:
        return params["m"] * params["d"]
    return 0


@dataclass(frozen=True)
class Instruction:
    op: str
    args: tuple = ()
    line: int = 0


@dataclass(frozen=True)
class EngineConfig:
    instructions: tuple[Instruction, ...]

    @classmethod
    def parse(cls, script: str) -> "EngineConfig":
        return cls(tuple(parse_script(script)))


def _parse_value(raw: str) -> Any:
    try:
        if "," in raw:
            return tuple(int(v, 0) for v in raw.split(",") if v)
        return int(raw, 0)
    except ValueError:
        if "," in raw:
            raise ConfigurationError(f"non-integer list value {raw!r}") from None
        return raw.lower()


def parse_script(script: str) -> list[Instruction]:
    out = []
    for lineno, raw in enumerate(script.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *rest = line.split()
        op = op.upper()
        if op == "SET_MODE":
            if len(rest) != 1:
                raise ConfigurationError(f"line {lineno}: SET_MODE takes exactly one mode")
            out.append(Instruction(op, (rest[0].upper(),), lineno))
        elif op == "SET_PARAMS":
            pairs = []
            for item in rest:
                key, sep, value = item.partition("=")
                if not sep or not key:
                    raise ConfigurationError(f"line {lineno}: expected key=value, got {item!r}")
                pairs.append((key.lower(), _parse_value(value)))
            out.append(Instruction(op, tuple(pairs), lineno))
        elif op == "LOAD_WEIGHTS":
            try:
                out.append(Instruction(op, tuple(int(v, 0) for v in rest), lineno))
            except ValueError:
                raise ConfigurationError(f"line {lineno}: LOAD_WEIGHTS needs integers") from None
        elif op == "RUN":
            if rest:
                raise ConfigurationError(f"line {lineno}: RUN takes no arguments")
            out.append(Instruction(op, (), lineno))
        else:
            raise ConfigurationError(f"line {lineno}: unknown instruction {op!r}")
    return out


@dataclass(frozen=True)
class RunStep:
    mode: Mode
    params: Mapping[str, Any]
    weights: tuple[int, ...]

    def run(self, data: Tensor, bias: Sequence[int] | None = None) -> Tensor:
        p, w = self.params, self.weights
        if self.mode is Mode.CONV1D:
            return Tensor.vector(run_fir(w, data.data).outputs)
        if self.mode is Mode.CONV2D:
            kernel = Tensor((p["kh"], p["kw"], p["c"]), w)
            return run_conv2d(data, kernel).feature_map
        if self.mode is Mode.MATMUL:
            n = p["n"]
            if data.dims != (n, n, 1):
                raise ConfigurationError(f"MATMUL expects an {n}x{n}x1 input, got {data.dims}")
            a = [list(w[i * n:(i + 1) * n]) for i in range(n)]
            return Tensor.from_rows(run_matmul(a, data.to_rows()).product)
        if self.mode in (Mode.POOL_MAX, Mode.POOL_AVG):
            mode = PoolMode.MAX if self.mode is Mode.POOL_MAX else PoolMode.AVG
            return run_pool(data, (p["ph"], p["pw"]), mode)
        m, d = p["m"], p["d"]
        if len(data.data) != d:
            raise ConfigurationError(f"FC expects {d} inputs, got {len(data.data)}")
        if bias is None:
            bias = p.get("bias", (0,) * m)
        bias = (bias,) if isinstance(bias, int) else tuple(bias)
        rows = [list(w[i * d:(i + 1) * d]) for i in range(m)]
        return Tensor.vector(run_fc(rows, data.data, bias, p.get("activation", Activation.RELU)))


@dataclass
class ConfiguredEngine:
    """Engine state after a program has been applied."""

    mode: Mode | None = None
    params: dict[str, Any] = field(default_factory=dict)
    weights: tuple[int, ...] = ()
    steps: list[RunStep] = field(default_factory=list)

    def run(self, data: Tensor, step: int = -1, bias: Sequence[int] | None = None) -> Tensor:
        if not self.steps:
            raise ConfigurationError("program contains no RUN")
        return self.steps[step].run(data, bias)


def _check_params(mode: Mode, params: Mapping[str, Any], where: str) -> None:
    allowed = set(_REQUIRED[mode]) | set(_OPTIONAL.get(mode, ()))
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise ConfigurationError(f"{where}: unknown parameter(s) {unknown} for {mode.value}")
    for key in _REQUIRED[mode]:
        value = params.get(key)
        if not isinstance(value, int) or value < 1:
            raise ConfigurationError(f"{where}: {mode.value} needs positive integer {key!r}")
    if mode is Mode.FC:
        act = params.get("activation", Activation.RELU.value)
        if act not in {a.value for a in Activation}:
            raise ConfigurationError(f"{where}: unknown activation {act!r}")
        bias = params.get("bias")
        if bias is not None:
            bias = (bias,) if isinstance(bias, int) else bias
            if not isinstance(bias, tuple) or len(bias) != params["m"]:
                raise ConfigurationError(f"{where}: bias needs {params['m']} integers")


def configure(program: EngineConfig | Sequence[Instruction] | str) -> ConfiguredEngine:
    """Apply a program, validating each RUN against the state it sees."""
    if isinstance(program, str):
        program = EngineConfig.parse(program)
    instructions = program.instructions if isinstance(program, EngineConfig) else tuple(program)
    eng = ConfiguredEngine()
    for ins in instructions:
        where = f"line {ins.line}" if ins.line else ins.op
        if ins.op == "SET_MODE":
            try:
                eng.mode = Mode(ins.args[0])
            except ValueError:
                raise ConfigurationError(f"{where}: unknown mode {ins.args[0]!r}") from None
            eng.params = {}
        elif ins.op == "SET_PARAMS":
            eng.params.update(dict(ins.args))
        elif ins.op == "LOAD_WEIGHTS":
            eng.weights = tuple(ins.args)
        elif ins.op == "RUN":
            if eng.mode is None:
                raise ConfigurationError(f"{where}: RUN before SET_MODE")
            _check_params(eng.mode, eng.params, where)
            need = weight_count(eng.mode, eng.params)
            if len(eng.weights) != need and need > 0:
                raise ConfigurationError(
                    f"{where}: {eng.mode.value} needs {need} weights, {len(eng.weights)} loaded")
            eng.steps.append(RunStep(eng.mode, dict(eng.params), eng.weights if need else ()))
        else:
            raise ConfigurationError(f"{where}: unknown instruction {ins.op!r}")
    return eng


def execute(program: EngineConfig | Sequence[Instruction] | str, data: Tensor,
            bias: Sequence[int] | None = None) -> list[Tensor]:
    """Run every RUN step in order, chaining outputs; returns each step's result."""
    eng = configure(program)
    results = []
    for step in eng.steps:
        data = step.run(data, bias if step.mode is Mode.FC else None)
        results.append(data)
    return results
