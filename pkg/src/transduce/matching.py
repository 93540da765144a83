"""Generalized matching condition and its impedance-matching reformulations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import (
    TransducerChain,
    continuant,
    effective_susceptibility_fwd,
    effective_susceptibility_rev,
    inverse_susceptibilities,
    prefix_continuants,
    suffix_continuants,
)
from .errors import InvalidRates

MATCH_TOL = 1e-9


@dataclass(frozen=True)
class MatchingResidual:
    """``M_N`` with its resistance (real) and resonance (imaginary) parts.

    ``scale`` is ``prod_j max(|d_j|, g_{j-1}, g_j)`` over the diagonal
    entries ``d_j`` of the matching matrix; it bounds every term of the
    determinant, so ``|M_N| <= tol * scale`` is a scale-free test.
    """

    M: complex
    scale: float
    tol: float = MATCH_TOL

    @property
    def resistance_part(self) -> float:
        return self.M.real

    @property
    def resonant_part(self) -> float:
        return self.M.imag

    @property
    def relative(self) -> float:
        return abs(self.M) / self.scale if self.scale else math.inf

    @property
    def matched(self) -> bool:
        return abs(self.M) <= self.tol * self.scale


@dataclass(frozen=True)
class MatchingSolution:
    """Operating frequencies ``nu`` with the internal efficiency they achieve.

    ``eta_internal`` is always recomputed from the scattering matrix;
    ``eta_predicted`` holds the closed-form value when one exists.
    """

    nu: tuple[float, ...]
    eta_internal: float
    branch: str
    residual: MatchingResidual
    eta_predicted: float | None = None
    flags: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "nu": list(self.nu),
            "eta_internal": self.eta_internal,
            "eta_predicted": self.eta_predicted,
            "branch": self.branch,
            "residual": {
                "re": self.residual.resistance_part,
                "im": self.residual.resonant_part,
                "relative": self.residual.relative,
                "matched": self.residual.matched,
            },
            "flags": list(self.flags),
        }


def _matching_diagonal(chain: TransducerChain, omega):
    chi_inv = inverse_susceptibilities(chain, omega)
    nu = chain.nu(omega)
    # first pivot -(chi_a^{-1})^* = i nu_a - kappa_a/2; intermediates lossless
    diag = [complex(-chain.kappa_a / 2, nu[0])]
    diag += [complex(0.0, v) for v in nu[1:-1]]
    diag.append(chi_inv[-1])
    return diag


def matching_determinant(chain: TransducerChain, omega: float = 0.0, tol: float = MATCH_TOL) -> MatchingResidual:
    """Evaluate ``M_N`` with intermediate linewidths forced to zero."""
    diag = _matching_diagonal(chain, omega)
    g = list(chain.couplings)
    M = continuant(diag, [x * x for x in g])
    gpad = [0.0] + g + [0.0]
    scale = math.prod(max(abs(d), gpad[j], gpad[j + 1]) for j, d in enumerate(diag))
    return MatchingResidual(complex(M), float(scale), tol)


def matching_gradient(chain: TransducerChain, omega: float = 0.0) -> np.ndarray:
    """``dM_N / dnu_j`` for every mode.

    ``M_N`` is linear in each diagonal entry, whose derivative in ``nu_j`` is
    ``i``; the cofactor splits into the leading and trailing blocks.
    """
    diag = _matching_diagonal(chain, omega)
    gsq = [x * x for x in chain.couplings]
    pre = prefix_continuants(diag, gsq)
    suf = suffix_continuants(diag, gsq)
    return np.array([1j * pre[j] * suf[j + 1] for j in range(len(diag))])


def impedance_residuals(chain: TransducerChain, omega: float = 0.0) -> tuple[complex, complex]:
    """Source-load mismatch seen from each end mode.

    Returns ``((chi_a^{-1})^* - g_a^2 chi_2,eff, (chi_b^{-1})^* - g_b^2 chi_{N+1},eff,r)``.
    """
    n = chain.n_modes
    chi_inv = inverse_susceptibilities(chain, omega)
    ga, gb = chain.couplings[0], chain.couplings[-1]
    res_a = np.conj(chi_inv[0]) - ga**2 / effective_susceptibility_fwd(chain, 1, omega)
    res_b = np.conj(chi_inv[-1]) - gb**2 / effective_susceptibility_rev(chain, n - 2, omega)
    return complex(res_a), complex(res_b)


def effective_cooperativities(chain: TransducerChain, omega: float = 0.0) -> np.ndarray:
    """``g_j^2 / ((chi_j,eff,r^{-1})^* chi_{j+1},eff^{-1})`` along the chain (complex)."""
    out = []
    for j, g in enumerate(chain.couplings):
        left = effective_susceptibility_rev(chain, j, omega)
        right = effective_susceptibility_fwd(chain, j + 1, omega)
        out.append(g * g / (np.conj(left) * right))
    return np.array(out, dtype=complex)


def make_solution(chain: TransducerChain, nu, branch: str, eta_predicted=None, flags=()) -> MatchingSolution:
    """Package frequencies ``nu`` for ``chain``, recomputing efficiency and residual."""
    from .scattering import scattering_matrix

    at = chain.at_frequencies(nu)
    eta = scattering_matrix(at, 0.0).eta_internal
    return MatchingSolution(
        nu=tuple(float(v) for v in nu),
        eta_internal=float(eta),
        branch=branch,
        residual=matching_determinant(at, 0.0),
        eta_predicted=eta_predicted,
        flags=tuple(flags),
    )


def solve_0stage(kappa_a: float, kappa_b: float, g: float) -> list[MatchingSolution]:
    """Optimal frequencies of a 0-stage transducer with lossless ends.

    Above unit cooperativity two detuned branches reach unity efficiency;
    otherwise the resonant point is optimal with ``4C / (C + 1)^2``.
    """
    for name, v in (("kappa_a", kappa_a), ("kappa_b", kappa_b), ("g", g)):
        if not v > 0 or not math.isfinite(v):
            raise InvalidRates(f"{name} must be positive and finite, got {v!r}")
    chain = TransducerChain.lossless_ends([kappa_a, kappa_b], [g])
    c = 4 * g * g / (kappa_a * kappa_b)
    if c > 1:
        root = math.sqrt(c - 1)
        return [
            make_solution(chain, (s * kappa_a / 2 * root, s * kappa_b / 2 * root), branch, 1.0)
            for s, branch in ((1, "detuned+"), (-1, "detuned-"))
        ]
    return [make_solution(chain, (0.0, 0.0), "resonant", 4 * c / (c + 1) ** 2)]
