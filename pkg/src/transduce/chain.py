"""Chain data model and susceptibility primitives.

Modes are indexed from 0 (the input mode ``a``) to ``N + 1`` (the output
mode ``b``); coupling ``g[j]`` links modes ``j`` and ``j + 1``.  All rates
share one arbitrary unit.

Only the combination ``nu_j = omega + detuning_j`` enters the dynamics, so
every function taking ``(chain, omega)`` can equally be driven by setting
the detunings to the desired ``nu`` and evaluating at ``omega = 0``
(:meth:`TransducerChain.at_frequencies`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DegenerateChain, InvalidChain, InvalidRates, ZeroLinewidth


def _check_rate(name, value, *, positive=False):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidRates(f"{name} must be finite, got {value!r}")
    if value < 0 or (positive and value == 0):
        bound = "> 0" if positive else ">= 0"
        raise InvalidRates(f"{name} must be {bound}, got {value!r}")
    return value


@dataclass(frozen=True)
class ModeParams:
    """One bosonic mode: rotating-frame detuning plus intrinsic and external decay."""

    detuning: float = 0.0
    kappa_i: float = 0.0
    kappa_ex: float = 0.0

    def __post_init__(self):
        d = float(self.detuning)
        if not math.isfinite(d):
            raise InvalidRates(f"detuning must be finite, got {d!r}")
        object.__setattr__(self, "detuning", d)
        object.__setattr__(self, "kappa_i", _check_rate("kappa_i", self.kappa_i))
        object.__setattr__(self, "kappa_ex", _check_rate("kappa_ex", self.kappa_ex))

    @property
    def kappa(self) -> float:
        return self.kappa_i + self.kappa_ex


@dataclass(frozen=True)
class TransducerChain:
    """An N-stage transducer: ``N + 2`` modes joined by ``N + 1`` beam-splitter couplings.

    Negative couplings are replaced by their magnitude (only ``g**2``
    matters) and a :class:`UserWarning` is issued.  Zero couplings are
    rejected unless ``degenerate=True``.
    """

    modes: tuple[ModeParams, ...]
    couplings: tuple[float, ...]
    degenerate: bool = False
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        couplings = [float(g) for g in self.couplings]
        if len(modes) < 2:
            raise InvalidChain(f"a chain needs at least 2 modes, got {len(modes)}")
        if len(couplings) != len(modes) - 1:
            raise InvalidChain(
                f"couplings: expected {len(modes) - 1} values for {len(modes)} modes, "
                f"got {len(couplings)}"
            )
        for j, m in enumerate(modes):
            if not isinstance(m, ModeParams):
                raise InvalidChain(f"modes[{j}] is not a ModeParams")
            end = j in (0, len(modes) - 1)
            if end and m.kappa_ex <= 0:
                raise InvalidChain(f"modes[{j}].kappa_ex: end modes need kappa_ex > 0")
            if not end and m.kappa_ex != 0:
                raise InvalidChain(f"modes[{j}].kappa_ex: intermediate modes must have kappa_ex = 0")
        for j, g in enumerate(couplings):
            if not math.isfinite(g):
                raise InvalidRates(f"couplings[{j}] must be finite, got {g!r}")
            if g < 0:
                warnings.warn(f"couplings[{j}] = {g} is negative; using |g|", UserWarning, stacklevel=3)
                couplings[j] = -g
            if couplings[j] == 0 and not self.degenerate:
                raise InvalidChain(f"couplings[{j}] is zero; pass degenerate=True to allow uncoupled links")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "couplings", tuple(couplings))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def build(cls, detunings, kappa_i, kappa_ex, couplings, **kw) -> "TransducerChain":
        """Assemble a chain from parallel per-mode sequences."""
        if not (len(detunings) == len(kappa_i) == len(kappa_ex)):
            raise InvalidChain("detunings, kappa_i and kappa_ex must have equal length")
        modes = tuple(ModeParams(d, ki, ke) for d, ki, ke in zip(detunings, kappa_i, kappa_ex))
        return cls(modes, tuple(couplings), **kw)

    @classmethod
    def lossless_ends(cls, kappas, couplings, detunings=None, **kw) -> "TransducerChain":
        """Chain whose end modes decay only into their external channels.

        ``kappas`` are total linewidths; intermediate entries become intrinsic loss.
        """
        n = len(kappas)
        detunings = [0.0] * n if detunings is None else detunings
        ki = [0.0] + list(kappas[1:-1]) + [0.0]
        ke = [kappas[0]] + [0.0] * (n - 2) + [kappas[-1]]
        return cls.build(detunings, ki, ke, couplings, **kw)

    # -- views ----------------------------------------------------------------

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def n_stages(self) -> int:
        return len(self.modes) - 2

    @property
    def detunings(self) -> np.ndarray:
        return np.array([m.detuning for m in self.modes])

    @property
    def kappa(self) -> np.ndarray:
        """Total linewidths."""
        return np.array([m.kappa for m in self.modes])

    @property
    def g(self) -> np.ndarray:
        return np.array(self.couplings)

    @property
    def kappa_a(self) -> float:
        return self.modes[0].kappa

    @property
    def kappa_b(self) -> float:
        return self.modes[-1].kappa

    @property
    def eta_external(self) -> float:
        a, b = self.modes[0], self.modes[-1]
        return (a.kappa_ex / a.kappa) * (b.kappa_ex / b.kappa)

    @property
    def lossless_intermediates(self) -> bool:
        return all(m.kappa == 0 for m in self.modes[1:-1])

    def nu(self, omega: float) -> np.ndarray:
        """Signal frequency relative to each mode, ``omega + detuning``."""
        return omega + self.detunings

    # -- derived chains -------------------------------------------------------

    def at_frequencies(self, nu: Sequence[float]) -> "TransducerChain":
        """Chain with detunings set so that ``omega = 0`` realises the given ``nu``."""
        nu = list(nu)
        if len(nu) != self.n_modes:
            raise InvalidChain(f"need {self.n_modes} frequencies, got {len(nu)}")
        modes = tuple(replace(m, detuning=v) for m, v in zip(self.modes, nu))
        return replace(self, modes=modes)

    def reversed(self) -> "TransducerChain":
        """The same chain read from ``b`` to ``a``."""
        return replace(self, modes=self.modes[::-1], couplings=self.couplings[::-1])

    def without_intermediate_loss(self) -> "TransducerChain":
        modes = (self.modes[0],) + tuple(replace(m, kappa_i=0.0) for m in self.modes[1:-1]) + (self.modes[-1],)
        return replace(self, modes=modes)

    def shifted(self, delta: float) -> "TransducerChain":
        """Add ``delta`` to every detuning (a global energy shift)."""
        modes = tuple(replace(m, detuning=m.detuning + delta) for m in self.modes)
        return replace(self, modes=modes)


def inverse_susceptibility(mode: ModeParams, omega: float) -> complex:
    """``i (omega + detuning) + kappa / 2``."""
    return complex(mode.kappa / 2, omega + mode.detuning)


def inverse_susceptibilities(chain: TransducerChain, omega):
    """Bare inverse susceptibilities of every mode; ``omega`` may be an array."""
    if np.ndim(omega):
        omega = np.asarray(omega, dtype=float)
        return [m.kappa / 2 + 1j * (omega + m.detuning) for m in chain.modes]
    return [complex(m.kappa / 2, omega + m.detuning) for m in chain.modes]


def continuant(diag: Sequence[complex], gsq: Sequence[float]) -> complex:
    """Determinant of the tridiagonal matrix with ``diag`` and off-diagonals ``i g``.

    Uses ``D_k = diag_k D_{k-1} + g_{k-1}**2 D_{k-2}``, which never divides.
    """
    d_prev, d = 1.0 + 0j, diag[0] + 0j
    for k in range(1, len(diag)):
        d_prev, d = d, diag[k] * d + gsq[k - 1] * d_prev
    return d


def prefix_continuants(diag, gsq) -> list[complex]:
    """``out[k]`` is the determinant of the leading ``k x k`` block (``out[0] = 1``)."""
    out = [1.0 + 0j, diag[0] + 0j]
    for k in range(1, len(diag)):
        out.append(diag[k] * out[-1] + gsq[k - 1] * out[-2])
    return out


def suffix_continuants(diag, gsq) -> list[complex]:
    """``out[k]`` is the determinant of the trailing block starting at row ``k``.

    ``out[n] = 1`` for the empty block.
    """
    rev = prefix_continuants(list(diag)[::-1], list(gsq)[::-1])
    return rev[::-1]


def effective_susceptibility_fwd(chain: TransducerChain, j: int, omega: float) -> complex:
    """Inverse susceptibility of mode ``j`` dressed by the modes to its right.

    Evaluated as a literal continued fraction from the ``b`` end inwards;
    raises :class:`DegenerateChain` on an exactly zero partial denominator.
    """
    n = chain.n_modes
    if not 0 <= j < n:
        raise IndexError(f"mode index {j} out of range for {n} modes")
    chi_inv = inverse_susceptibilities(chain, omega)
    g = chain.couplings
    x = chi_inv[n - 1]
    for k in range(n - 2, j - 1, -1):
        if x == 0:
            raise DegenerateChain(f"dressed inverse susceptibility of mode {k + 1} is zero", k + 1)
        x = chi_inv[k] + g[k] ** 2 / x
    return x


def effective_susceptibility_rev(chain: TransducerChain, j: int, omega: float) -> complex:
    """Inverse susceptibility of mode ``j`` dressed by the modes to its left."""
    n = chain.n_modes
    if not 0 <= j < n:
        raise IndexError(f"mode index {j} out of range for {n} modes")
    try:
        return effective_susceptibility_fwd(chain.reversed(), n - 1 - j, omega)
    except DegenerateChain as exc:
        raise DegenerateChain(str(exc).replace(f"mode {exc.index}", f"mode {n - 1 - exc.index}"),
                              n - 1 - exc.index) from None


def cooperativity(chain: TransducerChain, j: int) -> float:
    """``4 g_j**2 / (kappa_j kappa_{j+1})`` for the link between modes ``j`` and ``j + 1``."""
    kj, kk = chain.modes[j].kappa, chain.modes[j + 1].kappa
    if kj == 0 or kk == 0:
        raise ZeroLinewidth(f"cooperativity of link {j} undefined: linewidths ({kj}, {kk})")
    return 4 * chain.couplings[j] ** 2 / (kj * kk)
