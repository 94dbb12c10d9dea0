import numpy as np
import pytest

from oracles import lp_by_vertices
from qmetric.errors import InputError
from qmetric.lpcore import LinearProgram, solve


def _lp(obj, pairs):
    return LinearProgram.from_pairs(np.array(obj, dtype=float),
                                    [(np.array(r, dtype=float), float(b))
                                     for r, b in pairs])


def test_single_variable_cap():
    sol = solve(_lp([1.0], [([1.0], 3.0)]))
    assert sol.status == "optimal"
    assert sol.optimum == pytest.approx(3.0, abs=1e-9)
    assert sol.x[0] == pytest.approx(3.0, abs=1e-9)


def test_two_variable_shared_cap():
    sol = solve(_lp([1.0, 1.0], [([1.0, 0.0], 1.0),
                                 ([0.0, 1.0], 1.0),
                                 ([1.0, 1.0], 1.5)]))
    assert sol.status == "optimal"
    assert sol.optimum == pytest.approx(1.5, abs=1e-9)


def test_infeasible_detected():
    sol = solve(_lp([1.0], [([1.0], -1.0), ([-1.0], -3.0)]))
    assert sol.status == "infeasible"
    assert sol.optimum is None


def test_unbounded_detected():
    sol = solve(_lp([1.0], [([-1.0], 0.0)]))
    assert sol.status == "unbounded"


def test_negative_bound_goes_through_phase_one():
    # x >= 2 encoded as -x <= -2, maximize -x + 7 cap
    sol = solve(_lp([-1.0, 1.0], [([-1.0, 0.0], -2.0),
                                  ([0.0, 1.0], 7.0),
                                  ([1.0, 0.0], 10.0)]))
    assert sol.status == "optimal"
    assert sol.optimum == pytest.approx(5.0, abs=1e-9)
    assert sol.x[0] == pytest.approx(2.0, abs=1e-9)


def test_free_variables_can_go_negative():
    sol = solve(_lp([-1.0], [([-1.0], 5.0)]))
    assert sol.status == "optimal"
    assert sol.optimum == pytest.approx(5.0, abs=1e-9)
    assert sol.x[0] == pytest.approx(-5.0, abs=1e-9)


def test_redundant_rows_are_harmless():
    sol = solve(_lp([1.0, 1.0], [([1.0, 0.0], 1.0),
                                 ([1.0, 0.0], 1.0),
                                 ([2.0, 0.0], 2.0),
                                 ([0.0, 1.0], 2.0)]))
    assert sol.optimum == pytest.approx(3.0, abs=1e-9)


def test_degenerate_vertex():
    # three constraints meeting at the optimum of a 2-d program
    sol = solve(_lp([1.0, 1.0], [([1.0, 0.0], 1.0),
                                 ([0.0, 1.0], 1.0),
                                 ([1.0, 1.0], 2.0)]))
    assert sol.optimum == pytest.approx(2.0, abs=1e-9)


def test_classic_cycling_program_terminates():
    """Bland's rule finishes the textbook degenerate program."""
    rows = [([0.25, -60.0, -1.0 / 25.0, 9.0], 0.0),
            ([0.5, -90.0, -1.0 / 50.0, 3.0], 0.0),
            ([0.0, 0.0, 1.0, 0.0], 1.0)]
    rows += [(list(-e), 0.0) for e in np.eye(4)]
    obj = [0.75, -150.0, 1.0 / 50.0, -6.0]
    sol = solve(_lp(obj, rows))
    assert sol.status == "optimal"
    assert sol.optimum == pytest.approx(
        lp_by_vertices(obj, [r for r, _ in rows], [b for _, b in rows]),
        abs=1e-9)
    assert sol.optimum == pytest.approx(0.05, abs=1e-9)


def test_solution_satisfies_constraints(rng):
    for _ in range(25):
        n = int(rng.integers(2, 4))
        rows = [(rng.normal(size=n), float(abs(rng.normal())))
                for _ in range(int(rng.integers(1, 5)))]
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            rows += [(e.copy(), 3.0), (-e, 3.0)]
        obj = rng.normal(size=n)
        sol = solve(_lp(obj, rows))
        assert sol.status == "optimal"
        for r, b in rows:
            assert float(np.asarray(r) @ sol.x) <= b + 1e-7
        assert float(obj @ sol.x) == pytest.approx(sol.optimum, abs=1e-7)


def test_matches_vertex_enumeration(rng):
    """Simplex optimum equals exhaustive vertex search on boxed programs."""
    for _ in range(25):
        n = int(rng.integers(2, 4))
        rows = [(rng.normal(size=n), float(abs(rng.normal())))
                for _ in range(int(rng.integers(1, 5)))]
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            rows += [(e.copy(), 3.0), (-e, 3.0)]
        obj = rng.normal(size=n)
        sol = solve(_lp(obj, rows))
        ref = lp_by_vertices(obj, [r for r, _ in rows], [b for _, b in rows])
        assert sol.optimum == pytest.approx(ref, abs=1e-7)


def test_weak_duality_spot_check():
    # dual multipliers (0, 0, 1) certify the shared-cap optimum
    rows = [([1.0, 0.0], 1.0), ([0.0, 1.0], 1.0), ([1.0, 1.0], 1.5)]
    sol = solve(_lp([1.0, 1.0], rows))
    y = np.array([0.0, 0.0, 1.0])
    a = np.array([r for r, _ in rows])
    b = np.array([bd for _, bd in rows])
    assert np.allclose(a.T @ y, [1.0, 1.0])  # dual feasibility for c
    assert sol.optimum <= float(b @ y) + 1e-9


def test_shape_validation():
    with pytest.raises(InputError):
        _lp([1.0, 2.0], [([1.0], 1.0)])
    with pytest.raises(InputError):
        solve(LinearProgram(np.zeros(0), np.zeros((0, 0)), np.zeros(0)))


def test_tableau_dump_is_written(tmp_path):
    out = tmp_path / "tableau.csv"
    solve(_lp([1.0], [([1.0], 3.0)]), dump_csv=str(out))
    text = out.read_text()
    assert "phase" in text
    assert len(text.splitlines()) > 2
