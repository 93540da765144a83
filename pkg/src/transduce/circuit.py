"""Ladder-network synthesis of a transducer chain.

Element ``j`` of the ladder stands for mode ``j``.  Series branches are
impedances ``X = i w L + R + Rg`` and shunt branches admittances
``X = i w C + G + Gg``, where ``Rg``/``Gg`` are the purely imaginary
generalized resistance/conductance that encode the detuning.  Type 1
ladders start with a series inductor, type 2 ladders with a shunt
capacitor; they carry identical numbers with L and C (R and G) swapped.

The defining relations, with ``r_j`` the reactive value of element ``j``:

    1 / (r_j r_{j+1}) = g_j**2,   real_j / r_j = kappa_j / 2,   gen_j / r_j = i detuning_j

so that ``X_j / r_j`` is the bare inverse susceptibility.  The gauge fixes
``r_0``; all transmissions are gauge invariant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .chain import ModeParams, TransducerChain, continuant
from .errors import DegenerateNetwork, InvalidChain

SERIES = "series"
SHUNT = "shunt"


@dataclass(frozen=True)
class CircuitElement:
    """One ladder branch.

    For a series branch ``reactive`` is an inductance and ``real_ex``/``real_i``
    are resistances; for a shunt branch they are a capacitance and
    conductances.  ``generalized`` is the imaginary part of the generalized
    resistance (series) or conductance (shunt).
    """

    kind: str
    reactive: float
    real_ex: float = 0.0
    real_i: float = 0.0
    generalized: float = 0.0

    def __post_init__(self):
        if self.kind not in (SERIES, SHUNT):
            raise ValueError(f"kind must be {SERIES!r} or {SHUNT!r}, got {self.kind!r}")
        if not (self.reactive > 0 and math.isfinite(self.reactive)):
            raise ValueError(f"reactive value must be positive and finite, got {self.reactive!r}")
        if self.real_ex < 0 or self.real_i < 0:
            raise ValueError("real parts must be >= 0")

    @property
    def real(self) -> float:
        """Total resistance (series) or conductance (shunt)."""
        return self.real_ex + self.real_i

    @property
    def generalized_value(self) -> complex:
        """``Rg`` or ``Gg`` as a complex number with exactly zero real part."""
        return complex(0.0, self.generalized)

    @property
    def resistance(self) -> float:
        """``R`` for a series branch, ``1/G`` for a shunt branch."""
        if self.kind == SERIES:
            return self.real
        return 1 / self.real if self.real else math.inf

    @property
    def generalized_resistance(self) -> complex:
        """``Rg`` for a series branch, ``1/Gg`` for a shunt branch (infinite when ``Gg = 0``)."""
        if self.kind == SERIES:
            return self.generalized_value
        return 1 / self.generalized_value if self.generalized else complex(math.inf)

    @property
    def symbol(self) -> str:
        return "L" if self.kind == SERIES else "C"

    def bare(self, omega):
        """Bare impedance or admittance ``i w r + real + gen``."""
        return 1j * omega * self.reactive + self.real + self.generalized_value


@dataclass(frozen=True)
class CircuitNetwork:
    """Alternating series/shunt ladder between a source (element 0) and a load (last element)."""

    elements: tuple[CircuitElement, ...]
    topology: int
    gauge: float = 1.0

    def __post_init__(self):
        if self.topology not in (1, 2):
            raise ValueError(f"topology must be 1 or 2, got {self.topology!r}")
        if len(self.elements) < 2:
            raise ValueError("a ladder needs at least two elements")
        first = SERIES if self.topology == 1 else SHUNT
        for j, el in enumerate(self.elements):
            want = first if j % 2 == 0 else (SHUNT if first == SERIES else SERIES)
            if el.kind != want:
                raise ValueError(f"element {j} must be a {want} branch for topology {self.topology}")

    @property
    def n_stages(self) -> int:
        return len(self.elements) - 2

    @property
    def source_port(self) -> int:
        return 0

    @property
    def load_port(self) -> int:
        return len(self.elements) - 1

    def bare(self, omega) -> list:
        return [el.bare(omega) for el in self.elements]

    # -- export ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": "transduce-ladder",
            "version": 1,
            "topology": self.topology,
            "gauge": self.gauge,
            "elements": [
                {
                    "index": j,
                    "kind": el.kind,
                    "symbol": el.symbol,
                    "reactive": el.reactive,
                    "real_ex": el.real_ex,
                    "real_i": el.real_i,
                    "generalized_imag": el.generalized,
                }
                for j, el in enumerate(self.elements)
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc: dict) -> "CircuitNetwork":
        elements = tuple(
            CircuitElement(e["kind"], e["reactive"], e["real_ex"], e["real_i"], e["generalized_imag"])
            for e in doc["elements"]
        )
        return cls(elements, int(doc["topology"]), float(doc.get("gauge", elements[0].reactive)))

    def netlist(self) -> str:
        """Plain-text netlist, one element per line.

        Columns: index, kind, symbol, reactive value, external real part,
        intrinsic real part, imaginary part of the generalized element.
        Real parts are resistances on series lines and conductances on
        shunt lines.  Lines starting with ``#`` are comments.
        """
        lines = [
            f"# transduce ladder v1 topology={self.topology} gauge={self.gauge!r}",
            "# index kind symbol reactive real_ex real_i generalized_imag",
        ]
        for j, el in enumerate(self.elements):
            lines.append(
                f"{j} {el.kind} {el.symbol} {el.reactive!r} {el.real_ex!r} {el.real_i!r} {el.generalized!r}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_netlist(cls, text: str) -> "CircuitNetwork":
        topology, gauge, elements = None, None, []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("topology="):
                        topology = int(tok.split("=", 1)[1])
                    elif tok.startswith("gauge="):
                        gauge = float(tok.split("=", 1)[1])
                continue
            _, kind, _, *vals = line.split()
            elements.append(CircuitElement(kind, *map(float, vals)))
        if topology is None:
            topology = 1 if elements[0].kind == SERIES else 2
        return cls(tuple(elements), topology, gauge if gauge is not None else elements[0].reactive)


def synthesize(chain: TransducerChain, topology: int = 1, gauge: float = 1.0) -> CircuitNetwork:
    """Ladder network whose power-wave response reproduces ``chain``."""
    if topology not in (1, 2):
        raise ValueError(f"topology must be 1 or 2, got {topology!r}")
    if not (gauge > 0 and math.isfinite(gauge)):
        raise ValueError(f"gauge must be positive and finite, got {gauge!r}")
    if any(g == 0 for g in chain.couplings):
        raise InvalidChain("ladder synthesis needs every coupling nonzero")
    kinds = (SERIES, SHUNT) if topology == 1 else (SHUNT, SERIES)
    r = gauge
    elements = []
    for j, m in enumerate(chain.modes):
        if j:
            r = 1 / (chain.couplings[j - 1] ** 2 * r)
        elements.append(CircuitElement(kinds[j % 2], r, r * m.kappa_ex / 2, r * m.kappa_i / 2, r * m.detuning))
    return CircuitNetwork(tuple(elements), topology, gauge)


def chain_from_network(net: CircuitNetwork) -> TransducerChain:
    """Invert the defining relations."""
    els = net.elements
    modes = tuple(ModeParams(el.generalized / el.reactive, 2 * el.real_i / el.reactive,
                             2 * el.real_ex / el.reactive) for el in els)
    couplings = tuple(1 / math.sqrt(a.reactive * b.reactive) for a, b in zip(els, els[1:]))
    return TransducerChain(modes, couplings)


def ladder_effective_impedance(net: CircuitNetwork, j: int, omega: float) -> complex:
    """Effective impedance (or admittance) of element ``j`` with everything toward the load.

    ``X_j,eff = X_j + 1 / X_{j+1},eff`` evaluated from the load inwards;
    :class:`DegenerateNetwork` is raised on an exactly zero partial denominator.
    """
    n = len(net.elements)
    if not 0 <= j < n:
        raise IndexError(f"element index {j} out of range for {n} elements")
    x = net.elements[-1].bare(omega)
    for k in range(n - 2, j - 1, -1):
        if x == 0:
            raise DegenerateNetwork(f"effective impedance of element {k + 1} is zero", k + 1)
        x = net.elements[k].bare(omega) + 1 / x
    return complex(x)


def _ladder_continuant(net: CircuitNetwork, omega):
    # product of all effective impedances, computed without division
    k = continuant(net.bare(omega), [1.0] * (len(net.elements) - 1))
    if np.any(k == 0):
        raise DegenerateNetwork("ladder continuant vanishes", 0)
    return k


def power_transmission(net: CircuitNetwork, omega, internal: bool = False):
    """Power-wave transmission coefficient from source to load.

    ``internal=True`` gives ``2 sqrt(real_0 real_last) / prod X_eff``; the
    default additionally weights by the external fraction of both end
    elements.  ``omega`` may be an array.
    """
    first, last = net.elements[0], net.elements[-1]
    t = 2 * math.sqrt(first.real * last.real) / _ladder_continuant(net, np.asarray(omega, dtype=float))
    if internal:
        return t
    return math.sqrt(first.real_ex / first.real * last.real_ex / last.real) * t


def power_wave_reflection(z_source: complex, z_load: complex) -> complex:
    """``(Z_L - Z_S*) / (Z_L + Z_S)``; zero under conjugate matching."""
    return (z_load - np.conj(z_source)) / (z_load + z_source)


def source_reflection(net: CircuitNetwork, omega: float) -> complex:
    """Power-wave reflection between element 0 and the rest of the ladder.

    Equals the internal reflection ``r_a`` of the source chain.
    """
    load = 1 / ladder_effective_impedance(net, 1, omega)
    return complex(power_wave_reflection(net.elements[0].bare(omega), load))


def one_stage_impedances(chain: TransducerChain, omega: float = 0.0) -> dict:
    """Impedance bookkeeping of the 1-stage ladder viewed from the middle mode.

    Returns ``Z1 = g_a**2 chi_a``, ``Z2 = chi_2**-1`` and ``Z3 = g_b**2 chi_b``.
    """
    if chain.n_stages != 1:
        raise InvalidChain(f"expected a 1-stage chain, got {chain.n_stages} stages")
    from .chain import inverse_susceptibilities

    ca, c2, cb = inverse_susceptibilities(chain, omega)
    ga, gb = chain.couplings
    return {"Z1": ga**2 / ca, "Z2": c2, "Z3": gb**2 / cb}
