import math

import pytest

import gmclab

CANTOR = math.log(2) / math.log(3)


def test_version():
    assert gmclab.__version__ == "0.1.0"


def test_spectrum_and_kpz():
    assert gmclab.xi(0.5, 1, 1.0) == pytest.approx(1.0)
    assert gmclab.xi(0.5, 1, 2.0) == pytest.approx(1.5)
    assert gmclab.kpz_solve(CANTOR, 0.5, 1) == pytest.approx(0.569642264834269054, abs=1e-13)
    assert gmclab.kpz_solve_dual(CANTOR, 1.0, 1) == pytest.approx(0.5 * gmclab.kpz_solve(CANTOR, 1.0, 1), abs=1e-12)
    assert gmclab.moment_relation_constant(0.25, 0.5) == pytest.approx(2.723288216330671026, rel=1e-13)


def test_kernels():
    assert gmclab.partial_kernel("exact1d", 1, 4, 0.5) == pytest.approx(math.log(2))
    assert gmclab.level_increment("exact1d", 1, 3, 0.1) >= 0
    with pytest.raises(ValueError):
        gmclab.partial_kernel("cauchy", 1, 4, 0.5)


def test_sampling_is_deterministic():
    a = gmclab.field(grid=64, level=4, seed=3)
    b = gmclab.field(grid=64, level=4, seed=3)
    assert a == b and len(a) == 64
    flat = gmclab.chaos(1e-40, grid=64)
    assert sum(flat) == pytest.approx(1.0, abs=1e-12)
    atoms = gmclab.atomic_chaos(1.0, 1e-6, grid=64, level=8)
    assert len(atoms["mass"]) == len(atoms["x"]) > 0
    assert all(0.0 <= x < 1.0 for x in atoms["x"])


def test_hill_on_pareto_quantiles():
    n = 20000
    x = [((i - 0.5) / n) ** -2.0 for i in range(1, n + 1)]
    h = gmclab.hill(x, 200)
    assert h["estimate"] == pytest.approx(0.5, rel=0.02)
    assert h["stable"]


def test_validation_and_runs(tmp_path):
    assert gmclab.validate("duality", {"gamma2": "1"}) == []
    assert any("alpha out of (0,1)" in d for d in gmclab.validate("duality", {"gamma2": "2"}))
    with pytest.raises(ValueError):
        gmclab.run("chaos", {"no.such.key": "1"})
    r = gmclab.run("chaos", {"replicas": "200", "grid.N": "128", "out": str(tmp_path / "c"), "plot": "false"})
    assert r["passed"]
    assert "masses.csv" in r["files"]
    assert (tmp_path / "c" / "manifest.json").exists()
