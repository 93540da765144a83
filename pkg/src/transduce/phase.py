"""Cooperativity-space phase diagrams of the optimal operating point."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import TransducerChain
from .parallel import ordered_map
from .optimizer import RESONANCE_THRESHOLD, off_resonant_modes, optimal_frequencies

MODE_NAMES = {0: ("a", "b"), 1: ("a", "2", "b"), 2: ("a", "2", "3", "b")}
AXES = {0: ("C", "kappa_ratio"), 1: ("C_a2", "C_2b"), 2: ("C_a2", "C_3b")}
DEFAULT_C23 = 4.0


@dataclass(frozen=True)
class PhaseDiagramCell:
    """One grid point: coordinates, region label, maximal efficiency and optimal frequencies.

    ``label`` joins the names of the off-resonant modes with ``+``
    (``"resonant"`` when none is).
    """

    index: int
    x: float
    y: float
    label: str
    eta_max: float
    nu: tuple[float, ...]


def region_label(nu, kappas, n_stages: int, threshold: float = RESONANCE_THRESHOLD) -> str:
    names = MODE_NAMES[n_stages]
    off = off_resonant_modes(nu, kappas, threshold)
    return "+".join(names[j] for j in off) if off else "resonant"


def grid_axis(lo: float, hi: float, n: int, log: bool = False) -> np.ndarray:
    """``n`` points from ``lo`` to ``hi`` inclusive (geometric when ``log``)."""
    if n < 1 or not (lo > 0 and hi > 0) or (n > 1 and not hi > lo):
        raise ValueError(f"grid needs 0 < lo < hi and n >= 1, got lo={lo}, hi={hi}, n={n}")
    if n == 1:
        return np.array([float(lo)])
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def cell_chain(n_stages: int, x: float, y: float, kappas=None, c_23: float = DEFAULT_C23) -> TransducerChain:
    """Lossless-end chain realising the cooperativities of one grid point.

    For ``n_stages = 0`` the coordinates are the cooperativity and
    ``kappa_b / kappa_a``; otherwise they are the first and last link
    cooperativities (the middle link of a 2-stage chain is fixed at ``c_23``).
    """
    if n_stages == 0:
        ka = 1.0 if kappas is None else float(kappas[0])
        kap = [ka, ka * y]
        coops = [x]
    else:
        kap = [1.0] * (n_stages + 2) if kappas is None else [float(k) for k in kappas]
        if len(kap) != n_stages + 2:
            raise ValueError(f"need {n_stages + 2} linewidths, got {len(kap)}")
        coops = [x, y] if n_stages == 1 else [x, c_23, y]
    g = [math.sqrt(c * kap[j] * kap[j + 1] / 4) for j, c in enumerate(coops)]
    return TransducerChain.lossless_ends(kap, g)


def phase_diagram(n_stages: int, xs, ys, kappas=None, c_23: float = DEFAULT_C23,
                  threshold: float = RESONANCE_THRESHOLD, workers: int | None = None) -> list[PhaseDiagramCell]:
    """Closed-form optimum on every grid point, in row-major order (``y`` outer, ``x`` inner).

    Cells are computed independently (optionally on ``workers`` threads,
    default from ``TRANSDUCE_THREADS``) and returned sorted by index.
    """
    if n_stages not in MODE_NAMES:
        raise ValueError(f"phase diagrams cover 0, 1 or 2 stages, got {n_stages}")
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if xs.size == 0 or ys.size == 0 or np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("grid coordinates must be positive")
    points = [(i * xs.size + k, float(x), float(y)) for i, y in enumerate(ys) for k, x in enumerate(xs)]

    def run(point):
        idx, x, y = point
        chain = cell_chain(n_stages, x, y, kappas, c_23)
        sol = optimal_frequencies(chain)
        label = region_label(sol.nu, chain.kappa, n_stages, threshold)
        return PhaseDiagramCell(idx, x, y, label, sol.eta_internal, sol.nu)

    return sorted(ordered_map(run, points, workers), key=lambda c: c.index)
