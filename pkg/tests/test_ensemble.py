import math

import numpy as np
import pytest

from transduce.chain import ModeParams
from transduce.ensemble import (
    EnsembleSpec,
    atom_grid,
    collective_chain,
    discretized_ensemble_efficiency,
    discretized_network,
    lorentzian_quantiles,
)
from transduce.errors import InvalidRates
from transduce.scattering import efficiency_closed_form


def pilot(**kw):
    base = dict(n_atoms=100, mode_a=ModeParams(0, 0, 1), mode_b=ModeParams(0, 0, 1),
                g_a=0.1, g_23=0.5, g_b=0.1, kappa_2=1.0, kappa_3=1.0, gamma_2=0.5, gamma_3=0.5)
    base.update(kw)
    return EnsembleSpec(**base)


def test_collective_chain():
    ch = collective_chain(pilot(kappa_2=0.1))
    assert ch.g == pytest.approx([1.0, 0.5, 1.0])
    assert ch.kappa == pytest.approx([1.0, 0.6, 0.5 + 1.0, 1.0])


@pytest.mark.parametrize("k", [1, 7, 64, 256])
def test_unbroadened_ensemble_is_exact(k):
    spec = pilot(gamma_2=0.0, gamma_3=0.0, kappa_2=0.2, kappa_3=0.1, detuning_2=0.3)
    for w in (-0.7, 0.0, 0.4):
        ref = efficiency_closed_form(collective_chain(spec), w)
        assert discretized_ensemble_efficiency(spec, k, w) == pytest.approx(ref, rel=1e-9)


def test_undamped_atoms_do_not_converge():
    # without homogeneous width every sampled atom is a sharp resonance
    spec = pilot(kappa_2=0.0, kappa_3=0.0)
    ref = efficiency_closed_form(collective_chain(spec), 0.0)
    assert abs(discretized_ensemble_efficiency(spec, 201) / ref - 1) > 0.1


def test_broadened_ensemble_converges():
    spec = pilot()
    ref = efficiency_closed_form(collective_chain(spec), 0.0)
    errs = [abs(discretized_ensemble_efficiency(spec, k) / ref - 1) for k in (51, 101, 201)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.02


def test_single_level_broadening_uses_k_atoms():
    spec = pilot(gamma_3=0.0)
    w2, w3 = atom_grid(spec, 40)
    assert len(w2) == 40 and np.all(w3 == 0.0)
    assert len(atom_grid(pilot(), 40)[0]) == 36


def test_quantiles_are_symmetric_and_ordered():
    x = lorentzian_quantiles(1.0, 0.4, 9)
    assert np.all(np.diff(x) > 0)
    np.testing.assert_allclose(x - 1.0, -(x[::-1] - 1.0), atol=1e-12)
    assert x[4] == pytest.approx(1.0)
    cut = lorentzian_quantiles(0.0, 1.0, 9, truncation=2.0)
    assert np.max(np.abs(cut)) <= 2.0


def test_network_layout():
    net = discretized_network(pilot(gamma_3=0.0), 3)
    labels = [c[0] for c in net.channels]
    assert labels[:2] == ["a_ex", "A"] and labels[-2:] == ["B", "b_ex"]
    assert len(net.detunings) == 8


def test_validation():
    with pytest.raises(InvalidRates):
        pilot(n_atoms=0)
    with pytest.raises(InvalidRates):
        pilot(gamma_2=-1.0)
    with pytest.raises(InvalidRates):
        pilot(g_23=0.0)
    with pytest.raises(ValueError):
        atom_grid(pilot(), 0)
