import math

import pytest

import micellar


def test_version():
    assert micellar.__version__


def test_spectral_gap_hookean():
    assert abs(micellar.spectral_gap(h=1.0, n_q=64) - 1.0) < 1e-3
    assert abs(micellar.spectral_gap(h=2.0, n_q=64) - 2.0) < 2e-3


def test_eigenvalues_ladder():
    eigs = micellar.eigenvalues(h=1.0, n_q=64, count=5)
    assert abs(eigs[0]) < 1e-12
    for j, e in enumerate(eigs[1:], start=1):
        assert abs(e - j) < 5e-3 * j


def _small_config(scenario="equilibrium"):
    cfg = micellar.SimConfig()
    cfg.d_x = 1
    cfg.d_q = 1
    cfg.n_x = 8
    cfg.n_q = 32
    cfg.scenario = scenario
    cfg.t_end = 1.0
    return cfg


def test_equilibrium_is_fixed_point():
    s = micellar.Session(_small_config())
    m0 = s.total_mass()
    s.step(10)
    e = s.energy()
    assert e.free_energy <= 1e-20
    assert abs(s.total_mass() - m0) <= 1e-12 * m0
    assert s.rho_constraint_max() <= 1e-13


def test_kernel_bump_dissipates():
    cfg = _small_config("kernel-bump")
    cfg.amplitude = 1e-2
    s = micellar.Session(cfg)
    e0 = s.energy()
    s.step(20)
    e1 = s.energy()
    assert e1.free_energy < e0.free_energy
    assert e1.d_micro >= 0.0
    assert e1.d_r >= 0.0
    r = s.sobolev(2)
    assert r.e_total > 0.0
    assert r.equiv_upper and r.equiv_lower


def test_psi_shapes():
    s = micellar.Session(_small_config())
    a = s.psi_a()
    assert a.shape == (8, 32)
    assert (a > 0).all()


def test_parse_config_unknown_key():
    with pytest.raises(ValueError, match="bogus"):
        micellar.parse_config("n_x=8\nn_q=32\nscenario=equilibrium\nt_end=1\nbogus=1\n")


def test_parse_config_missing_required():
    with pytest.raises(ValueError, match="n_x"):
        micellar.parse_config("n_q=32\nscenario=equilibrium\nt_end=1\n")


def test_manifest_hash_stable():
    text = "n_x=8\nn_q=32\nscenario=equilibrium\nt_end=1\n"
    h1 = micellar.manifest_hash(micellar.parse_config(text))
    h2 = micellar.manifest_hash(micellar.parse_config(text))
    assert h1 == h2 and len(h1) == 16 and not math.isnan(float(int(h1, 16)))
