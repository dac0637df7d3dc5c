"""Smoke test for the phononet Python bindings.

Run with `python python/smoke_test.py` or under pytest after
`pip install --no-build-isolation -e crates/python`.
"""

import math

import phononet


def test_filter_dip():
    f = phononet.OptomechanicalFilter.reference()
    grid = f.default_grid()
    n = f.spectrum(grid)
    assert min(n) / f.n_th < 1e-3
    closed = f.closed_form(grid)
    assert max(abs(a - b) for a, b in zip(n, closed)) < 1e-9 * f.n_th
    fit = f.fit_dip(grid)
    assert abs(fit["width"] - 1.0) < 0.01
    assert abs(f.floor_estimates()["sideband"] - (300 / 1200) ** 2 / 4) < 1e-15


def test_transfer_and_fidelity():
    s = phononet.PulseSchedule(1.0)
    a = s.evolve(s.fine_grid(0.05))
    assert a["norm_defect"] < 1e-6
    assert abs(a["transfer"][-1]) > 1 - 1e-3
    clean = phononet.transfer_fidelity(s, 0.0)
    noisy = phononet.transfer_fidelity(s, 1.0)
    assert clean > 0.999 and noisy < clean
    n_eff = phononet.effective_occupation(20.0, 0.0, 1.0, 0.01)
    assert 0.0 < n_eff < 20.0


def test_circulator():
    p = phononet.circulator_probabilities(0.5, -math.pi / 2, 1.0, 0.0)
    assert p[0][1] > 0.999


def test_chain_and_raman():
    c = phononet.Chain(64, 100.0, 1.0, 1.0, 0.01, 20.0)
    cont = c.continuum()
    assert abs(cont["mean_free_path"] - 100.0) < 1e-9
    grid = [101.0 + 0.01 * k for k in range(5)]
    out = c.propagate(grid, [0.0] * 5, cont["mean_free_path"])
    assert all(abs(v - 20.0 * (1 - math.exp(-1))) < 1e-9 for v in out)

    r = phononet.spin_phonon_coupling(0.3, 10.0, 0.5, 0.5, 0.0, 0.7)
    assert r["figure_of_merit"] <= 0.3 / 0.7
    try:
        phononet.spin_phonon_coupling(0.3, 10.0, 0.5, 0.5, 0.0, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative decay rate accepted")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
