import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from komcnn.systolic import (
    ACC_MAX,
    AccumulatorOverflow,
    ConfigurationError,
    EngineConfig,
    Mode,
    ShapeError,
    SystolicArray,
    SystolicCell,
    Tensor,
    TensorFormatError,
    cell_step,
    configure,
    conv2d_oracle,
    execute,
    fir_oracle,
    matmul_oracle,
    run_conv2d,
    run_fc,
    run_fir,
    run_matmul,
    run_pool,
)

ints = st.integers(-1000, 1000)


def naive_fir(h, x):
    y = []
    for n in range(len(x)):
        acc = 0
        for k in range(len(h)):
            if n - k >= 0:
                acc += h[k] * x[n - k]
        y.append(acc)
    return y


# -- cell -----------------------------------------------------------------------------

def test_cell_step_examples():
    assert cell_step(SystolicCell(3), 5, 2) == 11
    assert cell_step(SystolicCell(0), 0, 987654) == 0
    c = SystolicCell(-2)
    assert cell_step(c, -7, 3) == -13
    assert c.y_reg == -13


def test_cell_overflow_reported():
    with pytest.raises(AccumulatorOverflow):
        cell_step(SystolicCell(1), ACC_MAX, 1)
    assert cell_step(SystolicCell(1), ACC_MAX - 1, 1) == ACC_MAX


def test_array_moves_one_cell_per_clock():
    arr = SystolicArray.from_weights([1, 1, 1])
    outs = [arr.clock([1, 1, 1], inject=t == 0) for t in range(4)]
    assert [v for _, v in outs] == [False, False, True, False]
    assert outs[2][0] == 3
    assert arr.cycle == 4 and arr.multiplications == 3


# -- FIR --------------------------------------------------------------------------------

def test_fir_identity_and_impulse():
    x = [4, -1, 7, 0, 3]
    assert run_fir([1], x).outputs == x
    assert run_fir([1, 2, 3], [1, 0, 0, 0, 0]).outputs == [1, 2, 3, 0, 0]


def test_fir_random_k5_n50():
    rng = random.Random(7)
    h = [rng.randint(-20, 20) for _ in range(5)]
    x = [rng.randint(-20, 20) for _ in range(50)]
    assert run_fir(h, x).outputs == naive_fir(h, x)


@given(st.lists(ints, min_size=1, max_size=9), st.lists(ints, min_size=1, max_size=40))
def test_fir_property(h, x):
    r = run_fir(h, x)
    assert r.outputs == naive_fir(h, x) == fir_oracle(h, x)
    assert r.latency == len(h)
    # One output per cycle once the chain has filled.
    assert r.cycles == len(x) + len(h) - 1
    assert r.multiplications == len(h) * len(x)


def test_fir_errors():
    with pytest.raises(ShapeError):
        run_fir([], [1, 2])
    with pytest.raises(ShapeError):
        run_fir([1], [])


# -- matmul -----------------------------------------------------------------------------------

def test_matmul_identity():
    b = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    eye = [[int(i == j) for j in range(3)] for i in range(3)]
    assert run_matmul(eye, b).product == b


def test_matmul_order_one():
    r = run_matmul([[6]], [[-7]])
    assert r.product == [[-42]] and r.multiplications == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7, 11])
def test_matmul_random(n):
    rng = random.Random(n)
    a = [[rng.randint(-99, 99) for _ in range(n)] for _ in range(n)]
    b = [[rng.randint(-99, 99) for _ in range(n)] for _ in range(n)]
    r = run_matmul(a, b)
    assert r.product == matmul_oracle(a, b)
    assert r.multiplications == n ** 3


def test_matmul_dimension_mismatch():
    with pytest.raises(ShapeError):
        run_matmul([[1, 2], [3, 4]], [[1]])
    with pytest.raises(ShapeError):
        run_matmul([[1, 2]], [[1, 2]])


# -- conv2d -----------------------------------------------------------------------------------

def test_conv2d_all_ones():
    r = run_conv2d(Tensor((5, 5, 3), [1] * 75), Tensor((3, 3, 3), [1] * 27))
    assert r.feature_map.dims == (3, 3, 1)
    assert set(r.feature_map.data) == {27}
    assert r.multiplications == 9 * 27


def test_conv2d_pointwise_scale():
    rng = random.Random(2)
    img = Tensor((4, 3, 1), [rng.randint(-9, 9) for _ in range(12)])
    out = run_conv2d(img, Tensor((1, 1, 1), [2])).feature_map
    assert out.data == tuple(2 * v for v in img.data)


def test_conv2d_random_6x6x2():
    rng = random.Random(4)
    img = Tensor((6, 6, 2), [rng.randint(-9, 9) for _ in range(72)])
    ker = Tensor((3, 3, 2), [rng.randint(-9, 9) for _ in range(18)])
    assert run_conv2d(img, ker).feature_map == conv2d_oracle(img, ker)


def test_conv2d_is_cross_correlation():
    img = Tensor.from_rows([[1, 2], [3, 4]])
    ker = Tensor.from_rows([[1, 0], [0, 0]])
    assert run_conv2d(img, ker).feature_map.data == (1,)


def test_conv2d_errors():
    with pytest.raises(ShapeError):
        run_conv2d(Tensor((5, 5, 3), [0] * 75), Tensor((3, 3, 2), [0] * 18))
    with pytest.raises(ShapeError):
        run_conv2d(Tensor((2, 2, 1), [0] * 4), Tensor((3, 3, 1), [0] * 9))


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 3), st.data())
def test_conv2d_property(h, w, c, data):
    kh = data.draw(st.integers(1, h))
    kw = data.draw(st.integers(1, w))
    img = Tensor((h, w, c), data.draw(st.lists(ints, min_size=h * w * c, max_size=h * w * c)))
    ker = Tensor((kh, kw, c), data.draw(st.lists(ints, min_size=kh * kw * c, max_size=kh * kw * c)))
    assert run_conv2d(img, ker).feature_map == conv2d_oracle(img, ker)


# -- pool / fc ------------------------------------------------------------------------------------

def test_pool_examples():
    m = Tensor.from_rows([[1, 2], [3, 4]])
    assert run_pool(m, (2, 2), "max").to_rows() == [[4]]
    assert run_pool(m, (2, 2), "avg").to_rows() == [[2]]
    neg = Tensor.from_rows([[-1, -2], [-2, -2]])
    assert run_pool(neg, (2, 2), "avg").to_rows() == [[-2]]  # floor(-7/4)


def test_pool_random_8x8():
    rng = random.Random(8)
    rows = [[rng.randint(-50, 50) for _ in range(8)] for _ in range(8)]
    for mode in ("max", "avg"):
        got = run_pool(Tensor.from_rows(rows), (2, 2), mode).to_rows()
        for i in range(4):
            for j in range(4):
                win = [rows[2 * i + a][2 * j + b] for a in range(2) for b in range(2)]
                assert got[i][j] == (max(win) if mode == "max" else sum(win) // 4)


def test_pool_non_divisible():
    with pytest.raises(ShapeError):
        run_pool(Tensor.from_rows([[1, 2, 3]]), (1, 2), "max")


def test_fc_examples():
    assert run_fc([[1, 1]], [2, 3], [1], "relu") == [6]
    assert run_fc([[-1, 0]], [5, 9], [0], "relu") == [0]


def test_fc_random_identity():
    rng = random.Random(12)
    w = [[rng.randint(-9, 9) for _ in range(6)] for _ in range(4)]
    x = [rng.randint(-9, 9) for _ in range(6)]
    b = [rng.randint(-9, 9) for _ in range(4)]
    want = [sum(w[i][j] * x[j] for j in range(6)) + b[i] for i in range(4)]
    assert run_fc(w, x, b, "identity") == want


def test_fc_dimension_mismatch():
    with pytest.raises(ShapeError):
        run_fc([[1, 2]], [1], [0])
    with pytest.raises(ShapeError):
        run_fc([[1, 2]], [1, 2], [0, 0])


# -- tensors ----------------------------------------------------------------------------------

def test_tensor_text_round_trip():
    t = Tensor((2, 3, 2), list(range(-6, 6)))
    assert Tensor.from_text(t.to_text()) == t


def test_tensor_format_errors():
    with pytest.raises(TensorFormatError):
        Tensor.from_text("2 2 1\n1 2 3")
    with pytest.raises(TensorFormatError):
        Tensor.from_text("0 2 1\n")
    with pytest.raises(TensorFormatError):
        Tensor.from_text("1 1 1\nx")


# -- configuration ------------------------------------------------------------------------------

def test_config_conv1d_impulse():
    prog = "SET_MODE CONV1D\nSET_PARAMS K=3\nLOAD_WEIGHTS 1 2 3\nRUN\n"
    assert execute(prog, Tensor.vector([1, 0, 0, 0, 0]))[0].data == (1, 2, 3, 0, 0)


def test_config_run_before_set_mode():
    with pytest.raises(ConfigurationError, match="RUN before SET_MODE"):
        configure("LOAD_WEIGHTS 1 2\nRUN")


def test_config_fc():
    prog = "SET_MODE FC\nSET_PARAMS m=1 d=2\nLOAD_WEIGHTS 1 1\nRUN"
    assert execute(prog, Tensor.vector([2, 3]), bias=[1])[0].data == (6,)
    prog_bias = "SET_MODE FC\nSET_PARAMS m=1 d=2 bias=1\nLOAD_WEIGHTS 1 1\nRUN"
    assert execute(prog_bias, Tensor.vector([2, 3]))[0].data == (6,)


@pytest.mark.parametrize("script, msg", [
    ("SET_MODE CONV1D\nSET_PARAMS k=3\nLOAD_WEIGHTS 1 2\nRUN", "needs 3 weights"),
    ("FFT 8", "unknown instruction"),
    ("SET_MODE WARP\nRUN", "unknown mode"),
    ("SET_MODE MATMUL\nRUN", "needs positive integer 'n'"),
    ("SET_MODE POOL_MAX\nSET_PARAMS ph=2 pw=2 k=1\nRUN", "unknown parameter"),
    ("SET_MODE FC\nSET_PARAMS m=1 d=1 activation=tanh\nLOAD_WEIGHTS 1\nRUN", "unknown activation"),
    ("SET_PARAMS K", "key=value"),
])
def test_config_errors(script, msg):
    with pytest.raises(ConfigurationError, match=msg):
        configure(script)


def test_config_last_mode_wins():
    eng = configure("SET_MODE CONV1D\nSET_PARAMS k=1\nLOAD_WEIGHTS 2\nSET_MODE POOL_MAX\nSET_PARAMS ph=1 pw=1\nRUN")
    assert eng.mode is Mode.POOL_MAX and len(eng.steps) == 1


def test_config_path_transparency():
    rng = random.Random(21)
    a = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
    b = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
    prog = "SET_MODE MATMUL\nSET_PARAMS n=3\nLOAD_WEIGHTS " + " ".join(str(v) for r in a for v in r) + "\nRUN"
    assert execute(prog, Tensor.from_rows(b))[0].to_rows() == run_matmul(a, b).product

    img = Tensor((6, 6, 2), [rng.randint(-9, 9) for _ in range(72)])
    ker = Tensor((3, 3, 2), [rng.randint(-9, 9) for _ in range(18)])
    prog = ("SET_MODE CONV2D\nSET_PARAMS kh=3 kw=3 c=2\nLOAD_WEIGHTS "
            + " ".join(map(str, ker.data)) + "\nRUN\nSET_MODE POOL_AVG\nSET_PARAMS ph=2 pw=2\nRUN")
    conv, pooled = execute(prog, img)
    assert conv == run_conv2d(img, ker).feature_map
    assert pooled == run_pool(conv, (2, 2), "avg")


def test_engine_config_parse_skips_comments():
    cfg = EngineConfig.parse("# header\n\nSET_MODE FC  # trailing\n")
    assert [i.op for i in cfg.instructions] == ["SET_MODE"]
