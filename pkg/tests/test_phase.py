import numpy as np
import pytest

from transduce.phase import AXES, cell_chain, grid_axis, phase_diagram, region_label


def test_grid_axis():
    assert grid_axis(1, 3, 3).tolist() == [1, 2, 3]
    assert grid_axis(1, 100, 3, log=True) == pytest.approx([1, 10, 100])
    assert grid_axis(2, 5, 1).tolist() == [2.0]
    with pytest.raises(ValueError):
        grid_axis(0, 1, 3)
    with pytest.raises(ValueError):
        grid_axis(2, 1, 3)


def test_zero_stage_threshold():
    cells = phase_diagram(0, [0.5, 2.0], [1.0])
    assert [c.label for c in cells] == ["resonant", "a+b"]
    assert cells[1].eta_max == pytest.approx(1.0)


def test_one_stage_regions():
    cells = phase_diagram(1, [0.5, 10.0], [0.5, 10.0])
    labels = {(c.x, c.y): c.label for c in cells}
    assert labels[(0.5, 0.5)] == "resonant"
    assert labels[(10.0, 0.5)] == "a+2"
    assert labels[(0.5, 10.0)] == "2+b"
    assert labels[(10.0, 10.0)] == "resonant"


def test_two_stage_regions():
    cells = phase_diagram(2, [0.3, 20.0], [0.3, 15.0])
    labels = {(c.x, c.y): c.label for c in cells}
    assert labels[(0.3, 0.3)] == "2+3"
    assert labels[(20.0, 15.0)] == "a+2+3+b"


def test_row_major_order_and_parallel_equivalence():
    xs, ys = grid_axis(0.1, 20, 6, log=True), grid_axis(0.1, 20, 4, log=True)
    serial = phase_diagram(1, xs, ys, workers=1)
    threaded = phase_diagram(1, xs, ys, workers=4)
    assert serial == threaded
    assert [c.index for c in serial] == list(range(24))
    assert serial[7].x == xs[1] and serial[7].y == ys[1]


def test_cell_chain_cooperativities():
    ch = cell_chain(2, 3.0, 5.0, kappas=[1, 2, 3, 4], c_23=7.0)
    c = 4 * ch.g**2 / (ch.kappa[:-1] * ch.kappa[1:])
    assert c == pytest.approx([3.0, 7.0, 5.0])
    with pytest.raises(ValueError):
        cell_chain(1, 1.0, 1.0, kappas=[1, 1])


def test_region_label_and_axes():
    assert region_label([0, 0.5, 0], [1, 1, 1], 1) == "2"
    assert AXES[0] == ("C", "kappa_ratio")
    with pytest.raises(ValueError):
        phase_diagram(3, [1.0], [1.0])
    with pytest.raises(ValueError):
        phase_diagram(1, [-1.0], [1.0])
