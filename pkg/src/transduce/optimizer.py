"""Optimal operating frequencies for lossy chains.

Closed forms cover 0-, 1- and 2-stage chains; :func:`optimize_general`
searches any chain numerically (multi-start Nelder-Mead followed by a
Newton polish of ``|D|^2``, and of ``M_N`` when the intermediate modes are
lossless).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .chain import TransducerChain, continuant, prefix_continuants, suffix_continuants
from .errors import InvalidRates
from .matching import MatchingSolution, make_solution, matching_determinant, matching_gradient

RESONANCE_THRESHOLD = 1e-6


def _check_positive(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v) and v > 0):
            raise InvalidRates(f"{name} must be positive and finite, got {v!r}")


def _g_from_c(c, k1, k2):
    return math.sqrt(c * k1 * k2 / 4)


def _coop(chain, j):
    k1, k2 = chain.modes[j].kappa, chain.modes[j + 1].kappa
    return 4 * chain.couplings[j] ** 2 / (k1 * k2)


# -- closed forms -----------------------------------------------------------------


def _match_from_a(chain: TransducerChain) -> list[float]:
    """Frequencies giving ``r_a = 0`` with ``nu_b = 0`` for a 2-stage chain with lossless mode 2.

    Mode 3 together with ``b`` loads mode 2 with ``Z = g23^2 / (i nu3 + K)``;
    the real part of ``Z`` is tuned either through ``nu3`` (when the load is
    too strong) or the source side through ``nu_a``.
    """
    ka = chain.kappa_a
    k3, kb = chain.modes[2].kappa, chain.kappa_b
    ga, g23, gb = chain.couplings
    K = k3 / 2 + 2 * gb**2 / kb
    W = g23**2 / K
    target = 2 * ga**2 / ka
    if W >= target:
        nu_a = 0.0
        nu3 = math.sqrt(max(g23**2 * K / target - K**2, 0.0))
        nu2 = g23**2 * nu3 / (nu3**2 + K**2)
    else:
        nu3 = 0.0
        nu_a = math.sqrt(max(ga**2 * ka / (2 * W) - ka**2 / 4, 0.0))
        nu2 = ga**2 * nu_a / (ka**2 / 4 + nu_a**2)
    return [nu_a, nu2, nu3, 0.0]


def _lossless_1stage(chain: TransducerChain) -> list[float]:
    """A root of ``M_1`` with ``nu_b = 0`` for a 1-stage chain with lossless middle."""
    ka, kb = chain.kappa_a, chain.kappa_b
    ga, gb = chain.couplings
    W = 2 * gb**2 / kb
    target = 2 * ga**2 / ka
    if W >= target:
        # shrink the source-side load through nu_b instead
        nu_b = math.sqrt(max(gb**2 * kb / (2 * target) - kb**2 / 4, 0.0))
        z = gb**2 / complex(kb / 2, nu_b)
        return [0.0, -z.imag, nu_b]
    nu_a = math.sqrt(max(ga**2 * ka / (2 * W) - ka**2 / 4, 0.0))
    nu2 = ga**2 * nu_a / (ka**2 / 4 + nu_a**2)
    return [nu_a, nu2, 0.0]


def optimal_1stage(c_a2: float, c_2b: float, kappa_a: float = 1.0, kappa_2: float = 1.0,
                   kappa_b: float = 1.0) -> MatchingSolution:
    """Optimal frequencies of a lossy 1-stage transducer with lossless ends.

    Returns the positive-sign member of each ``+/-`` pair; negating every
    frequency gives the mirror optimum.
    """
    _check_positive(c_a2=c_a2, c_2b=c_2b, kappa_a=kappa_a, kappa_2=kappa_2, kappa_b=kappa_b)
    kap = [kappa_a, kappa_2, kappa_b]
    chain = TransducerChain.lossless_ends(kap, [_g_from_c(c_a2, kappa_a, kappa_2),
                                                _g_from_c(c_2b, kappa_2, kappa_b)])
    return _optimal_1stage_chain(chain)


def _optimal_1stage_chain(chain: TransducerChain) -> MatchingSolution:
    ka, k2, kb = chain.kappa
    if k2 == 0:
        return make_solution(chain, _lossless_1stage(chain), "lossless", 1.0)
    ca, cb = _coop(chain, 0), _coop(chain, 1)
    flags = ("boundary_tie",) if (ca + 1 == cb or ca == cb + 1) else ()
    if ca + 1 < cb:
        root = math.sqrt(cb / (ca + 1) - 1)
        nu = [0.0, k2 / 2 * (ca + 1) * root, kb / 2 * root]
        return make_solution(chain, nu, "b_overcoupled", ca / (ca + 1))
    if ca > cb + 1:
        root = math.sqrt(ca / (cb + 1) - 1)
        nu = [ka / 2 * root, k2 / 2 * (cb + 1) * root, 0.0]
        return make_solution(chain, nu, "a_overcoupled", cb / (cb + 1))
    eta = 4 * ca * cb / (ca + cb + 1) ** 2
    return make_solution(chain, [0.0, 0.0, 0.0], "resonant", eta, flags)


def optimal_2stage(c_a2: float, c_23: float, c_3b: float, kappas=(1.0, 1.0, 1.0, 1.0)) -> MatchingSolution:
    """Optimal frequencies of a lossy 2-stage transducer with lossless ends.

    Where the optimum comes as ``+/-`` pairs the positive sign of ``nu_a``
    (or of ``nu_2`` / ``nu_b`` when ``nu_a = 0``) is returned.  In the
    regime where both end modes are over-coupled the sign of the ``b``-side
    pair is independent of the ``a``-side one; the anti-correlated member
    is returned.
    """
    _check_positive(c_a2=c_a2, c_23=c_23, c_3b=c_3b)
    kappas = [float(k) for k in kappas]
    if len(kappas) != 4:
        raise InvalidRates("kappas must hold four linewidths")
    _check_positive(**{f"kappa_{j}": k for j, k in enumerate(kappas)})
    g = [_g_from_c(c, kappas[j], kappas[j + 1]) for j, c in enumerate((c_a2, c_23, c_3b))]
    return _optimal_2stage_chain(TransducerChain.lossless_ends(kappas, g))


def _optimal_2stage_chain(chain: TransducerChain) -> MatchingSolution:
    ka, k2, k3, kb = chain.kappa
    if k2 == 0 and k3 == 0:
        return make_solution(chain, _match_from_a(chain), "lossless", 1.0)
    if k2 == 0:
        return make_solution(chain, _match_from_a(chain), "mode2_lossless",
                             (c := _coop(chain, 2)) / (c + 1))
    if k3 == 0:
        nu = _match_from_a(chain.reversed())[::-1]
        return make_solution(chain, nu, "mode3_lossless", (c := _coop(chain, 0)) / (c + 1))

    x, c, y = _coop(chain, 0), _coop(chain, 1), _coop(chain, 2)
    sa = c / (y + 1)  # cooperativity of the middle link loaded by b
    sb = c / (x + 1)
    split = (x + 1) * (y + 1)
    ties = []
    if c > split:
        root = math.sqrt(c / split - 1)
        nu = [0.0, k2 * (x + 1) * root / 2, k3 * (y + 1) * root / 2, 0.0]
        return make_solution(chain, nu, "middle_split", x / (x + 1) * y / (y + 1))
    if c == split or x - sa == 1 or y - sb == 1:
        ties.append("boundary_tie")
    a_over = x >= y and x > sa + 1
    b_over = y >= x and y > sb + 1
    r = math.sqrt(c + 1)
    if a_over:
        if y * y > c + 1:
            nu_a = ka / 2 * math.sqrt(x / r - 1)
            nu_b = -kb / 2 * math.sqrt(y / r - 1)
            nu = [nu_a, k2 / ka * r * nu_a, k3 / kb * r * nu_b, nu_b]
            return make_solution(chain, nu, "both_overcoupled", c / (r + 1) ** 2)
        if y * y == c + 1:
            ties.append("subbranch_tie")
        nu_a = ka / 2 * math.sqrt(x / (sa + 1) - 1)
        nu = [nu_a, k2 / ka * (sa + 1) * nu_a, 0.0, 0.0]
        return make_solution(chain, nu, "a_overcoupled", y / (y + 1) * c / (c + y + 1), ties)
    if b_over:
        if x * x > c + 1:
            nu_b = kb / 2 * math.sqrt(y / r - 1)
            nu_a = -ka / 2 * math.sqrt(x / r - 1)
            nu = [nu_a, k2 / ka * r * nu_a, k3 / kb * r * nu_b, nu_b]
            return make_solution(chain, nu, "both_overcoupled", c / (r + 1) ** 2)
        if x * x == c + 1:
            ties.append("subbranch_tie")
        nu_b = kb / 2 * math.sqrt(y / (sb + 1) - 1)
        nu = [0.0, 0.0, k3 / kb * (sb + 1) * nu_b, nu_b]
        return make_solution(chain, nu, "b_overcoupled", x / (x + 1) * c / (x + c + 1), ties)
    eta = 4 * x * c * y / (x + c + y + x * y + 1) ** 2
    return make_solution(chain, [0.0] * 4, "resonant", eta, ties)


def _optimal_0stage_chain(chain: TransducerChain) -> MatchingSolution:
    ka, kb = chain.kappa
    c = _coop(chain, 0)
    if c > 1:
        root = math.sqrt(c - 1)
        return make_solution(chain, [ka / 2 * root, kb / 2 * root], "detuned", 1.0)
    flags = ("boundary_tie",) if c == 1 else ()
    return make_solution(chain, [0.0, 0.0], "resonant", 4 * c / (c + 1) ** 2, flags)


def optimal_frequencies(chain: TransducerChain) -> MatchingSolution:
    """Closed-form optimum for a chain of up to two stages.

    Only the total linewidths and couplings matter; ``eta_predicted`` is the
    internal efficiency (the external prefactor is not included).
    """
    if chain.n_stages > 2:
        raise ValueError("closed forms exist for at most two stages; use optimize_general")
    if chain.n_stages == 0:
        return _optimal_0stage_chain(chain)
    if chain.n_stages == 1:
        return _optimal_1stage_chain(chain)
    return _optimal_2stage_chain(chain)


# -- numerical search ---------------------------------------------------------------


@dataclass(frozen=True)
class OptimizationProblem:
    """Maximise the internal efficiency over the free ``nu_j`` of a fixed chain.

    ``pins`` lists mode indices held at ``nu_j = 0``.
    """

    chain: TransducerChain
    pins: frozenset[int] = field(default_factory=frozenset)
    n_starts: int = 16
    max_iter: int = 400
    max_rounds: int = 4
    seed: int = 0
    tol: float = 1e-10
    polish: bool = True

    def __post_init__(self):
        pins = frozenset(int(p) % self.chain.n_modes for p in self.pins)
        object.__setattr__(self, "pins", pins)
        if self.n_starts < 1 or self.max_iter < 1 or self.max_rounds < 1:
            raise ValueError("n_starts, max_iter and max_rounds must be positive")

    @property
    def free(self) -> list[int]:
        return [j for j in range(self.chain.n_modes) if j not in self.pins]


def _variable_scale(chain: TransducerChain) -> np.ndarray:
    k = chain.kappa
    g = [0.0] + list(chain.couplings) + [0.0]
    return np.array([k[j] if k[j] > 0 else max(g[j], g[j + 1]) for j in range(len(k))])


class _Objective:
    """``|D(nu)|^2`` and its derivatives for a fixed chain."""

    def __init__(self, chain: TransducerChain):
        self.half = [k / 2 for k in chain.kappa]
        self.gsq = [g * g for g in chain.couplings]
        self.n = chain.n_modes
        self.numerator = chain.kappa_a * chain.kappa_b * math.prod(self.gsq)

    def diag(self, nu):
        return [complex(h, v) for h, v in zip(self.half, nu)]

    def det(self, nu) -> complex:
        return continuant(self.diag(nu), self.gsq)

    def eta(self, nu) -> float:
        return self.numerator / abs(self.det(nu)) ** 2

    def grad_hess(self, nu, free):
        d = self.diag(nu)
        pre = prefix_continuants(d, self.gsq)
        suf = suffix_continuants(d, self.gsq)
        D = pre[-1]
        dD = {j: 1j * pre[j] * suf[j + 1] for j in free}
        m = len(free)
        grad = np.array([2 * (D.conjugate() * dD[j]).real for j in free])
        H = np.zeros((m, m))
        for a, j in enumerate(free):
            # mids[k]: continuant of the block j+1..k-1 (empty block -> 1)
            mids = prefix_continuants(d[j + 1:], self.gsq[j + 1:]) if j + 1 < self.n else [1 + 0j]
            for b in range(a, m):
                k = free[b]
                if k == j:
                    d2 = 0j
                else:
                    d2 = -pre[j] * mids[k - j - 1] * suf[k + 1]
                H[a, b] = H[b, a] = 2 * ((dD[k].conjugate() * dD[j]).real + (D.conjugate() * d2).real)
        return abs(D) ** 2, grad, H


def _newton_polish(obj: _Objective, nu, free, scale, max_iter=40):
    nu = np.array(nu, dtype=float)
    if not free:
        return nu
    F, grad, H = obj.grad_hess(nu, free)
    for _ in range(max_iter):
        step = np.linalg.lstsq(H, -grad, rcond=1e-12)[0]
        improved = False
        for alpha in (1.0, 0.5, 0.25, 0.125):
            trial = nu.copy()
            trial[free] += alpha * step
            Ft, gt, Ht = obj.grad_hess(trial, free)
            # near the minimum F only moves by roundoff; the gradient still resolves the step
            if Ft < F or (Ft <= F * (1 + 1e-13) and np.linalg.norm(gt) < np.linalg.norm(grad)):
                improved = True
                nu, F, grad, H = trial, Ft, gt, Ht
                break
        if not improved or np.max(np.abs(step) / scale[free]) < 1e-15:
            break
    return nu


def _match_polish(chain: TransducerChain, nu, free, max_iter=30):
    nu = np.array(nu, dtype=float)
    if len(free) == 0:
        return nu
    for _ in range(max_iter):
        at = chain.at_frequencies(nu)
        M = matching_determinant(at).M
        if M == 0:
            break
        J = matching_gradient(at)[free]
        Jr = np.vstack([J.real, J.imag])
        step = np.linalg.lstsq(Jr, -np.array([M.real, M.imag]), rcond=1e-14)[0]
        trial = nu.copy()
        trial[free] += step
        if abs(matching_determinant(chain.at_frequencies(trial)).M) >= abs(M):
            break
        nu = trial
    return nu


def _seeds(problem: OptimizationProblem, scale, rng):
    chain, free = problem.chain, problem.free
    seeds = [np.zeros(chain.n_modes)]
    if chain.n_stages <= 2:
        try:
            cf = np.array(optimal_frequencies(chain).nu)
            seeds += [cf, -cf]
        except (ValueError, ArithmeticError):
            pass
    for s in seeds:
        s[list(problem.pins)] = 0.0
    while len(seeds) < problem.n_starts:
        s = np.zeros(chain.n_modes)
        s[free] = rng.normal(0.0, 1.5, len(free)) * scale[free]
        seeds.append(s)
    return seeds[: max(problem.n_starts, 1)]


def optimize_general(problem: OptimizationProblem) -> MatchingSolution:
    """Multi-start simplex search for the frequencies maximising the internal efficiency.

    Search variables are ``nu_j / kappa_j`` (couplings stand in for zero
    linewidths).  Rounds of restarts continue until one improves the best
    efficiency by less than ``problem.tol``; otherwise the result carries the
    ``no_convergence`` flag.
    """
    chain, free = problem.chain, problem.free
    obj = _Objective(chain)
    scale = _variable_scale(chain)
    rng = np.random.default_rng(problem.seed)
    lossless = chain.lossless_intermediates

    def refine(nu0):
        nu = np.array(nu0, dtype=float)
        if free:
            x0 = nu[free] / scale[free]

            def f(x):
                trial = nu.copy()
                trial[free] = x * scale[free]
                return math.log(abs(obj.det(trial)) ** 2)

            res = minimize(f, x0, method="Nelder-Mead",
                           options={"maxiter": problem.max_iter, "xatol": 1e-9, "fatol": 1e-14})
            nu[free] = res.x * scale[free]
            if problem.polish:
                nu = _newton_polish(obj, nu, free, scale)
                if lossless:
                    matched = _match_polish(chain, nu, free)
                    # eta near 1 is only resolved to roundoff; a smaller residual wins
                    if obj.eta(matched) >= obj.eta(nu) - 1e-12:
                        nu = matched
        return nu, obj.eta(nu)

    best_nu, best_eta = None, -1.0
    converged = False
    starts = _seeds(problem, scale, rng)
    for rnd in range(problem.max_rounds):
        if rnd:
            spread = 1.5 * 0.5**rnd
            starts = []
            for _ in range(problem.n_starts):
                s = best_nu.copy()
                s[free] += rng.normal(0.0, spread, len(free)) * scale[free]
                starts.append(s)
        round_best = best_eta
        for s in starts:
            nu, eta = refine(s)
            if eta > best_eta:
                best_nu, best_eta = nu, eta
        if rnd and best_eta - round_best < problem.tol:
            converged = True
            break
        if not free:
            converged = True
            break
    flags = () if converged else ("no_convergence",)
    return make_solution(chain, best_nu, "numerical", None, flags)


def off_resonant_modes(nu, kappas, threshold: float = RESONANCE_THRESHOLD) -> tuple[int, ...]:
    """Indices with ``|nu_j| > threshold * kappa_j``."""
    return tuple(j for j, (v, k) in enumerate(zip(nu, kappas)) if abs(v) > threshold * k)
