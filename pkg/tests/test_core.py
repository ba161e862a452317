import math
import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smco.core import (
    MAXIMIZE,
    MINIMIZE,
    Box,
    BufferedBox,
    EvalTracker,
    Objective,
    RngStream,
    RunRecord,
    as_rng,
    clamp_to_box,
    negate_objective,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_box_rejects_bad_bounds():
    with pytest.raises(ValueError):
        Box([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        Box([0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        Box([0.0], [np.inf])
    with pytest.raises(ValueError):
        Box([], [])


def test_box_from_pairs_and_readonly():
    box = Box([(-1, 2), (0, 5)])
    assert box.dim == 2
    np.testing.assert_array_equal(box.width, [3, 5])
    with pytest.raises(ValueError):
        box.lower[0] = 3.0


def test_clamp_examples():
    box = Box.cube(-5.12, 5.12, 2)
    np.testing.assert_array_equal(clamp_to_box([7, -7], box), [5.12, -5.12])
    np.testing.assert_array_equal(clamp_to_box([0, 0], box), [0, 0])
    np.testing.assert_array_equal(clamp_to_box([5.12], Box([-5.12], [5.12])), [5.12])
    with pytest.raises(ValueError):
        clamp_to_box([1.0, 2.0, 3.0], box)


@given(st.lists(finite, min_size=3, max_size=3))
def test_clamp_idempotent_and_inside(x):
    box = Box([-1.0, 0.0, 2.0], [1.0, 10.0, 3.0])
    once = clamp_to_box(x, box)
    assert box.contains(once)
    np.testing.assert_array_equal(clamp_to_box(once, box), once)


def test_negate_examples():
    obj = Objective(lambda x: float(x[0] ** 2), 1)
    neg = negate_objective(obj)
    assert neg([2.0]) == -4.0
    assert neg.direction == MINIMIZE
    back = negate_objective(neg)
    assert back([2.0]) == 4.0
    assert back.direction == MAXIMIZE
    zero = negate_objective(Objective(lambda x: 0.0, 3))
    assert zero([1.0, 2.0, 3.0]) == 0.0


@given(finite)
def test_negate_is_involution(v):
    obj = Objective(lambda x: float(x[0]) * 3.0 - 1.0, 1, MINIMIZE)
    twice = negate_objective(negate_objective(obj))
    assert twice([v]) == obj([v])
    assert twice.direction == obj.direction


@given(st.floats(0.01, 0.49), st.lists(st.floats(-100, 100), min_size=1, max_size=4),
       st.floats(0.1, 50))
def test_buffered_width(frac, lows, width):
    box = Box(np.array(lows), np.array(lows) + width)
    ext = BufferedBox(box, frac)
    np.testing.assert_allclose(ext.width, (1 + 2 * frac) * box.width, rtol=1e-12)
    assert np.all(ext.lower < box.lower) and np.all(box.upper < ext.upper)


def test_buffered_rejects_fraction():
    box = Box.cube(0, 1, 2)
    for bad in (-0.1, 0.5, 0.7):
        with pytest.raises(ValueError):
            BufferedBox(box, bad)


def test_rng_stream_determinism_long():
    a = RngStream(123, 4).random(10_000)
    b = RngStream(123, 4).random(10_000)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, RngStream(123, 5).random(10_000))
    assert not np.array_equal(a, RngStream(124, 4).random(10_000))


def test_rng_stream_thread_independent():
    out = {}

    def worker(i):
        out[i] = RngStream(9).substream(i).random(1000)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for i in range(8):
        assert np.array_equal(out[i], RngStream(9, (i,)).random(1000))


def test_rng_reset_and_as_rng():
    r = RngStream(1)
    first = r.random(5)
    np.testing.assert_array_equal(r.reset().random(5), first)
    assert as_rng(None).seed == 0
    assert as_rng(7).seed == 7
    with pytest.raises(TypeError):
        as_rng("seed")


def test_tracker_counts_and_nonfinite():
    obj = Objective(lambda x: math.nan if x[0] > 0 else float(x[0]), 1)
    tr = EvalTracker(obj)
    assert tr.value([1.0]) == -math.inf
    assert tr.value([-2.0]) == -2.0
    vals = tr.values(np.array([[3.0], [-1.0]]))
    assert vals[0] == -math.inf and vals[1] == -1.0
    assert tr.evaluations == 4
    assert tr.best_value == -1.0
    np.testing.assert_array_equal(tr.best_point, [-1.0])


def test_tracker_min_direction():
    obj = Objective(lambda x: float(x[0] ** 2), 1, MINIMIZE)
    tr = EvalTracker(obj)
    tr.value([2.0])
    tr.value([1.0])
    assert tr.to_user(tr.best_value) == 1.0


def test_objective_batch_matches_scalar():
    obj = Objective(lambda x: float(np.sum(x**2)), 2)
    pts = np.array([[1.0, 2.0], [0.0, -1.0]])
    np.testing.assert_array_equal(obj.eval_batch(pts), [5.0, 1.0])
    vec = Objective(lambda x: np.sum(x**2, axis=-1), 2, vectorized=True)
    np.testing.assert_array_equal(vec.eval_batch(pts), [5.0, 1.0])


def test_runrecord_better():
    rec = RunRecord(np.zeros(1), 0.0, np.zeros(1), 0.0, 0, 0, False, MINIMIZE)
    assert rec.better(1.0, 2.0) and not rec.better(2.0, 1.0)
