"""Input-output scattering of transducer chains and general coupled-mode networks.

Three independent routes to the conversion efficiency live here:

* :func:`efficiency_closed_form` - the determinant (continuant) formula;
* :func:`scattering_matrix` - a banded linear solve of the Langevin system
  for a chain;
* :func:`network_scattering` - a dense solve for an arbitrary
  :class:`CoupledModeNetwork`, the reference oracle.

Langevin equations in the frequency domain read ``A m = K^T s_in`` with
``A = diag(i nu + kappa/2) - i G`` and each port ``p`` attached to one mode at
rate ``kappa_p``; the outputs are ``s_out = s_in - K m``, so
``S = 1 - K A^{-1} K^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .chain import TransducerChain, continuant, inverse_susceptibilities
from .errors import InvalidChain, SingularSystem


def chain_port_labels(n_stages: int) -> tuple[str, ...]:
    """Port order ``a_ex, A, M1..MN, B, b_ex`` (``N + 4`` ports)."""
    return ("a_ex", "A") + tuple(f"M{j}" for j in range(1, n_stages + 1)) + ("B", "b_ex")


@dataclass(frozen=True)
class ScatteringResult:
    omega: float
    ports: tuple[str, ...]
    S: np.ndarray
    eta_total: float
    eta_internal: float
    eta_external: float
    r_a: complex
    r_b: complex

    def element(self, out_port: str, in_port: str) -> complex:
        """``S[out <- in]`` by port label."""
        return self.S[self.ports.index(out_port), self.ports.index(in_port)]


@dataclass(frozen=True)
class CoupledModeNetwork:
    """Modes with real detunings, a symmetric coupling matrix and decay channels.

    ``channels`` holds ``(label, mode, rate)`` triples; each becomes one port.
    ``source``/``sink`` name the end modes used for the internal efficiency
    and reflections; ``input_port``/``output_port`` define ``eta_total``.
    """

    detunings: np.ndarray
    couplings: np.ndarray
    channels: tuple[tuple[str, int, float], ...]
    source: int = 0
    sink: int = -1
    input_port: str = "a_ex"
    output_port: str = "b_ex"

    def __post_init__(self):
        det = np.asarray(self.detunings, dtype=float)
        G = np.asarray(self.couplings, dtype=float)
        m = det.size
        if G.shape != (m, m):
            raise InvalidChain(f"coupling matrix must be {m}x{m}, got {G.shape}")
        if not np.array_equal(G, G.T):
            raise InvalidChain("coupling matrix must be symmetric")
        if np.any(np.diag(G) != 0):
            raise InvalidChain("coupling matrix must have a zero diagonal")
        channels = tuple((str(lab), int(mode), float(rate)) for lab, mode, rate in self.channels)
        labels = [c[0] for c in channels]
        if len(set(labels)) != len(labels):
            raise InvalidChain("port labels must be unique")
        for lab, mode, rate in channels:
            if not 0 <= mode < m:
                raise InvalidChain(f"port {lab!r} attached to missing mode {mode}")
            if rate < 0 or not np.isfinite(rate):
                raise InvalidChain(f"port {lab!r} has invalid rate {rate}")
        for lab in (self.input_port, self.output_port):
            if lab not in labels:
                raise InvalidChain(f"unknown port {lab!r}")
        object.__setattr__(self, "detunings", det)
        object.__setattr__(self, "couplings", G)
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "source", self.source % m)
        object.__setattr__(self, "sink", self.sink % m)

    @property
    def n_modes(self) -> int:
        return self.detunings.size

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(c[0] for c in self.channels)

    def linewidths(self) -> np.ndarray:
        k = np.zeros(self.n_modes)
        for _, mode, rate in self.channels:
            k[mode] += rate
        return k

    @classmethod
    def from_chain(cls, chain: TransducerChain) -> "CoupledModeNetwork":
        n = chain.n_modes
        G = np.zeros((n, n))
        for j, g in enumerate(chain.couplings):
            G[j, j + 1] = G[j + 1, j] = g
        a, b = chain.modes[0], chain.modes[-1]
        channels = [("a_ex", 0, a.kappa_ex), ("A", 0, a.kappa_i)]
        channels += [(f"M{j}", j, m.kappa_i) for j, m in enumerate(chain.modes[1:-1], start=1)]
        channels += [("B", n - 1, b.kappa_i), ("b_ex", n - 1, b.kappa_ex)]
        return cls(chain.detunings, G, tuple(channels), source=0, sink=n - 1)


def _coupling_matrix(net: CoupledModeNetwork) -> np.ndarray:
    K = np.zeros((len(net.channels), net.n_modes))
    for p, (_, mode, rate) in enumerate(net.channels):
        K[p, mode] = np.sqrt(rate)
    return K


def _singular(net_detunings, linewidths, omega, cause=None):
    nu = omega + np.asarray(net_detunings)
    suspects = [int(j) for j in np.flatnonzero((linewidths == 0) & (nu == 0))]
    msg = f"dynamical matrix is singular at omega={omega!r}"
    if suspects:
        msg += f"; undamped resonant mode(s) {suspects}"
    return SingularSystem(msg, suspects)


def network_scattering(net: CoupledModeNetwork, omega: float) -> ScatteringResult:
    """Full scattering matrix of a coupled-mode network by dense LU solve."""
    kappa = net.linewidths()
    A = np.diag(1j * (omega + net.detunings) + kappa / 2) - 1j * net.couplings
    K = _coupling_matrix(net)
    rhs = np.zeros((net.n_modes, K.shape[0] + 2), dtype=complex)
    rhs[:, :-2] = K.T
    rhs[net.source, -2] = 1
    rhs[net.sink, -1] = 1
    try:
        X = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise _singular(net.detunings, kappa, omega) from exc
    if not np.all(np.isfinite(X)):
        raise _singular(net.detunings, kappa, omega)
    S = np.eye(K.shape[0]) - K @ X[:, :-2]
    return _assemble(omega, net.ports, S, kappa[net.source], kappa[net.sink],
                     X[net.source, -2], X[net.sink, -2], X[net.sink, -1],
                     net.input_port, net.output_port, dict((c[0], c[2]) for c in net.channels))


def _assemble(omega, ports, S, k_src, k_snk, inv_ss, inv_ts, inv_tt, inp, outp, rates):
    # inv_xy = (A^{-1})[x, y] for source s and sink t
    eta_int = float(k_src * k_snk * abs(inv_ts) ** 2)
    eta_ext = (rates[inp] / k_src) * (rates[outp] / k_snk) if k_src and k_snk else 0.0
    return ScatteringResult(
        omega=float(omega),
        ports=tuple(ports),
        S=S,
        eta_total=float(abs(S[ports.index(outp), ports.index(inp)]) ** 2),
        eta_internal=eta_int,
        eta_external=float(eta_ext),
        r_a=complex(1 - k_src * inv_ss),
        r_b=complex(1 - k_snk * inv_tt),
    )


def scattering_matrix(chain: TransducerChain, omega: float) -> ScatteringResult:
    """Scattering matrix of a chain over all ``N + 4`` ports (banded solve)."""
    n = chain.n_modes
    chi_inv = np.array(inverse_susceptibilities(chain, omega))
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = -1j * chain.g
    ab[1, :] = chi_inv
    ab[2, :-1] = -1j * chain.g
    ports = chain_port_labels(chain.n_stages)
    mode_of = [0, 0] + list(range(1, n - 1)) + [n - 1, n - 1]
    a, b = chain.modes[0], chain.modes[-1]
    rates = [a.kappa_ex, a.kappa_i] + [m.kappa_i for m in chain.modes[1:-1]] + [b.kappa_i, b.kappa_ex]
    sq = np.sqrt(rates)
    rhs = np.zeros((n, len(ports) + 1), dtype=complex)
    for p, (mode, s) in enumerate(zip(mode_of, sq)):
        rhs[mode, p] = s
    rhs[n - 1, -1] = 1
    try:
        X = scipy.linalg.solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise _singular(chain.detunings, chain.kappa, omega) from exc
    if not np.all(np.isfinite(X)):
        raise _singular(chain.detunings, chain.kappa, omega)
    S = np.eye(len(ports)) - sq[:, None] * X[mode_of, :-1]
    col_b = X[:, -1]
    # A^{-1} column for mode a, recovered from the a_ex drive (kappa_a,ex > 0 by invariant)
    col_a = X[:, 0] / sq[0]
    return _assemble(omega, ports, S, chain.kappa_a, chain.kappa_b,
                     col_a[0], col_a[n - 1], col_b[n - 1],
                     "a_ex", "b_ex", dict(zip(ports, rates)))


def tridiagonal_determinant(chain: TransducerChain, omega) -> complex:
    """Determinant of the chain's dynamical matrix; ``omega`` may be an array."""
    return continuant(inverse_susceptibilities(chain, omega), [g * g for g in chain.couplings])


def _coupling_product_sq(chain: TransducerChain) -> float:
    return float(np.prod(np.square(chain.couplings)))


def internal_efficiency(chain: TransducerChain, omega):
    """``kappa_a kappa_b prod(g**2) / |D|**2``; vectorised over ``omega``."""
    D = tridiagonal_determinant(chain, omega)
    return chain.kappa_a * chain.kappa_b * _coupling_product_sq(chain) / np.abs(D) ** 2


def efficiency_closed_form(chain: TransducerChain, omega):
    """Total conversion efficiency from the determinant formula."""
    return chain.eta_external * internal_efficiency(chain, omega)


def _end_reflection(chain: TransducerChain, omega):
    chi_inv = inverse_susceptibilities(chain, omega)
    gsq = [g * g for g in chain.couplings]
    D = continuant(chi_inv, gsq)
    first = [-np.conj(chi_inv[0])] + chi_inv[1:]
    return continuant(first, gsq) / D


def reflection_coefficients(chain: TransducerChain, omega) -> tuple[complex, complex]:
    """Internal reflections ``(r_a, r_b)`` at the two end modes.

    Uses ``r_a = M_a / D``, where ``M_a`` is the chain determinant with the
    first pivot replaced by ``-(chi_a^{-1})^*``; this equals the
    continued-fraction form ``(g_a^2 chi_2eff - (chi_a^{-1})^*) /
    (g_a^2 chi_2eff + chi_a^{-1})`` after multiplying through by the
    product of dressed susceptibilities, and stays finite where a partial
    denominator vanishes.
    """
    return _end_reflection(chain, omega), _end_reflection(chain.reversed(), omega)


# -- added noise ----------------------------------------------------------------


@dataclass(frozen=True)
class NoiseResult:
    n_add_ab: float
    n_add_ba: float
    closed_form: bool
    premise_violation: bool = False


def _occupation_vector(ports, occupations: Mapping[str, float] | None):
    occupations = dict(occupations or {})
    unknown = set(occupations) - set(ports)
    if unknown:
        raise InvalidChain(f"unknown port(s) in occupations: {sorted(unknown)}")
    return np.array([float(occupations.get(p, 0.0)) for p in ports])


def added_noise_closed_form(chain: TransducerChain, occupations=None) -> tuple[float, float]:
    """Added noise of a matched chain with lossless intermediate modes.

    ``n_add_ab`` refers to the signal entering ``a_ex`` and leaving ``b_ex``;
    the bath feeding the input mode (``A``) enters with ``kappa_a,i / kappa_a,ex``.
    """
    occ = dict(zip(chain_port_labels(chain.n_stages),
                   _occupation_vector(chain_port_labels(chain.n_stages), occupations)))
    a, b = chain.modes[0], chain.modes[-1]
    ka, kai, kae = a.kappa, a.kappa_i, a.kappa_ex
    kb, kbi, kbe = b.kappa, b.kappa_i, b.kappa_ex
    ab = (kai / kae * occ["A"]
          + ka / kae * kbi / kb * occ["B"]
          + ka / kae * kb / kbe * (kbi / kb) ** 2 * occ["b_ex"])
    ba = (kbi / kbe * occ["B"]
          + kb / kbe * kai / ka * occ["A"]
          + kb / kbe * ka / kae * (kai / ka) ** 2 * occ["a_ex"])
    return float(ab), float(ba)


def added_noise_general(chain: TransducerChain, omega: float, occupations=None) -> tuple[float, float]:
    """Added noise from the full scattering matrix: output occupation over ``eta`` minus the signal."""
    res = scattering_matrix(chain, omega)
    n = _occupation_vector(res.ports, occupations)
    ia, ib = res.ports.index("a_ex"), res.ports.index("b_ex")
    P = np.abs(res.S) ** 2
    eta = P[ib, ia]
    if eta == 0:
        return float("inf"), float("inf")
    ab = (P[ib] @ n - P[ib, ia] * n[ia]) / eta
    ba = (P[ia] @ n - P[ia, ib] * n[ib]) / eta
    return float(ab), float(ba)


def added_noise(chain: TransducerChain, omega: float, occupations=None,
                method: str = "auto") -> NoiseResult:
    """Added noise in both conversion directions.

    The closed form only holds for matched chains with lossless
    intermediate modes.  ``method="auto"`` uses it there and the full
    scattering matrix elsewhere; ``method="closed_form"`` off that premise
    falls back to the scattering path and sets ``premise_violation``.
    """
    if method not in ("auto", "closed_form", "general"):
        raise ValueError(f"unknown method {method!r}")
    from .matching import matching_determinant

    premise = chain.lossless_intermediates and matching_determinant(chain, omega).matched
    if method != "general" and premise:
        return NoiseResult(*added_noise_closed_form(chain, occupations), closed_form=True)
    ab, ba = added_noise_general(chain, omega, occupations)
    return NoiseResult(ab, ba, closed_form=False, premise_violation=(method == "closed_form"))


def efficiency_sweep(chain: TransducerChain, omegas: Sequence[float]) -> dict[str, np.ndarray]:
    """Efficiencies and reflection powers over a frequency grid (closed forms, vectorised)."""
    w = np.asarray(omegas, dtype=float)
    eta_int = internal_efficiency(chain, w)
    r_a, r_b = reflection_coefficients(chain, w)
    return {
        "omega": w,
        "eta_total": chain.eta_external * eta_int,
        "eta_internal": eta_int,
        "refl_a": np.abs(r_a) ** 2,
        "refl_b": np.abs(r_b) ** 2,
    }
