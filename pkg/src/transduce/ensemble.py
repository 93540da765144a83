"""Atomic-ensemble intermediates: collective coupling and Lorentzian broadening.

Each atom contributes one sub-mode to level 2 and one to level 3, linked by
``g_23``; the input mode couples to every level-2 sub-mode and the output
mode to every level-3 sub-mode.  :func:`collective_chain` is the reduced
2-stage chain (``sqrt(N_A)`` enhanced couplings, linewidths ``kappa + Gamma``);
:func:`discretized_network` keeps the sub-modes explicitly and serves as the
brute-force check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ModeParams, TransducerChain
from .errors import InvalidRates
from .scattering import CoupledModeNetwork, network_scattering


@dataclass(frozen=True)
class EnsembleSpec:
    """Two end modes bridged by two collective atomic levels.

    ``gamma_2``/``gamma_3`` are Lorentzian FWHM inhomogeneous widths of the
    level frequencies; ``g_a``/``g_b`` are single-atom couplings.
    """

    n_atoms: int
    mode_a: ModeParams
    mode_b: ModeParams
    g_a: float
    g_23: float
    g_b: float
    detuning_2: float = 0.0
    detuning_3: float = 0.0
    kappa_2: float = 0.0
    kappa_3: float = 0.0
    gamma_2: float = 0.0
    gamma_3: float = 0.0

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise InvalidRates(f"n_atoms must be a positive integer, got {self.n_atoms!r}")
        for name in ("kappa_2", "kappa_3", "gamma_2", "gamma_3"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InvalidRates(f"{name} must be >= 0, got {v!r}")
        for name in ("g_a", "g_23", "g_b"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise InvalidRates(f"{name} must be > 0, got {v!r}")


def collective_chain(spec: EnsembleSpec) -> TransducerChain:
    """Reduced 2-stage chain with enhanced couplings and broadened linewidths."""
    root = math.sqrt(spec.n_atoms)
    modes = (
        spec.mode_a,
        ModeParams(spec.detuning_2, spec.kappa_2 + spec.gamma_2, 0.0),
        ModeParams(spec.detuning_3, spec.kappa_3 + spec.gamma_3, 0.0),
        spec.mode_b,
    )
    return TransducerChain(modes, (root * spec.g_a, spec.g_23, root * spec.g_b))


def lorentzian_quantiles(center: float, fwhm: float, n: int, truncation: float | None = None) -> np.ndarray:
    """``n`` equal-mass midpoints of a Lorentzian with full width ``fwhm``.

    With ``truncation`` set, the distribution is first restricted to
    ``center +/- truncation * fwhm`` and renormalized.  The untruncated rule
    is the default: its outermost point is already finite, and any cut
    removes atoms whose other level still responds.
    """
    if fwhm == 0:
        return np.full(n, float(center))
    half = fwhm / 2
    edge = 0.5 if truncation is None else math.atan(truncation * fwhm / half) / math.pi
    u = -edge + 2 * edge * (np.arange(n) + 0.5) / n
    return center + half * np.tan(np.pi * u)


def atom_grid(spec: EnsembleSpec, k: int, truncation: float | None = None):
    """Level-2 and level-3 frequencies of the sampled atoms.

    With both levels broadened, the two quantile sets form an ``n x n``
    tensor grid with ``n = round(sqrt(k))``, so the atoms sample the product
    of independent distributions; the atom count is then ``n**2``.  With at
    most one level broadened ``k`` atoms are used.
    """
    if k < 1:
        raise ValueError(f"need at least one sub-mode, got {k}")
    if spec.gamma_2 > 0 and spec.gamma_3 > 0:
        n = max(1, round(math.sqrt(k)))
        w2 = lorentzian_quantiles(spec.detuning_2, spec.gamma_2, n, truncation)
        w3 = lorentzian_quantiles(spec.detuning_3, spec.gamma_3, n, truncation)
        a, b = np.meshgrid(w2, w3, indexing="ij")
        return a.ravel(), b.ravel()
    return (lorentzian_quantiles(spec.detuning_2, spec.gamma_2, k, truncation),
            lorentzian_quantiles(spec.detuning_3, spec.gamma_3, k, truncation))


def discretized_network(spec: EnsembleSpec, k: int, truncation: float | None = None) -> CoupledModeNetwork:
    """Explicit network of sampled atoms approximating the broadened ensemble.

    Every atom carries one level-2 and one level-3 sub-mode; its couplings to
    the end modes are ``g sqrt(N_A / K)`` with ``K`` the number of sampled atoms.
    """
    w2, w3 = atom_grid(spec, k, truncation)
    k = len(w2)
    weight = math.sqrt(spec.n_atoms / k)

    n = 2 * k + 2
    b = n - 1
    lvl2 = np.arange(1, k + 1)
    lvl3 = lvl2 + k
    det = np.empty(n)
    det[0], det[b] = spec.mode_a.detuning, spec.mode_b.detuning
    det[lvl2] = w2
    det[lvl3] = w3
    G = np.zeros((n, n))
    G[0, lvl2] = G[lvl2, 0] = weight * spec.g_a
    G[lvl2, lvl3] = G[lvl3, lvl2] = spec.g_23
    G[lvl3, b] = G[b, lvl3] = weight * spec.g_b
    channels = [("a_ex", 0, spec.mode_a.kappa_ex), ("A", 0, spec.mode_a.kappa_i)]
    channels += [(f"M2_{i}", int(m), spec.kappa_2) for i, m in enumerate(lvl2)]
    channels += [(f"M3_{i}", int(m), spec.kappa_3) for i, m in enumerate(lvl3)]
    channels += [("B", b, spec.mode_b.kappa_i), ("b_ex", b, spec.mode_b.kappa_ex)]
    return CoupledModeNetwork(det, G, tuple(channels), source=0, sink=b)


def discretized_ensemble_efficiency(spec: EnsembleSpec, k: int, omega: float = 0.0,
                                    truncation: float | None = None) -> float:
    """Total conversion efficiency of the sampled-atom network at ``omega``."""
    return network_scattering(discretized_network(spec, k, truncation), omega).eta_total
