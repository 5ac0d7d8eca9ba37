import numpy as np
import pytest

from ter.benchmarks import make_problem
from ter.core import Allowance, Objective, SolutionState
from ter.heuristics import LS1, REGISTRY, CooperativeCoevolution, SuccessHistoryDE, build_heuristic
from ter.heuristics._box import reflect
from ter.heuristics.cc import embed, random_groups


def sphere_1d():
    return Objective(lambda x: float(x[0] ** 2), [-2.5], [2.5])


def start(problem, seed):
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(problem.lower, problem.upper)
    return SolutionState(x0, problem(x0))


def factories():
    return {
        "ls1": lambda seed: LS1(seed=seed),
        "cc": lambda seed: CooperativeCoevolution(seed=seed),
        "gs": lambda seed: SuccessHistoryDE(seed=seed),
    }


class TestLS1:
    def test_first_probe(self):
        h = LS1()
        h._setup(np.array([-2.5]), np.array([2.5]))
        assert h.search_range[0] == pytest.approx(1.0)
        h.search_range[:] = 0.5
        sol = h.apply(Allowance(sphere_1d(), 1), SolutionState(np.array([1.0]), 1.0))
        assert sol.y_best == 0.25 and sol.x_best[0] == 0.5

    def test_unimproved_pass_halves_range(self):
        h = LS1()
        h._setup(np.array([-2.5]), np.array([2.5]))
        h.search_range[:] = 0.5
        sol = h.apply(Allowance(sphere_1d(), 2), SolutionState(np.array([0.0]), 0.0))
        assert sol.y_best == 0.0
        assert h.search_range[0] == 0.25
        assert h.cursor == 0

    def test_range_reset_below_floor(self):
        h = LS1(min_range=1e-3)
        h._setup(np.array([-2.5]), np.array([2.5]))
        h.search_range[:] = 0.008  # halves to 0.004 < 0.005 -> reset
        h.apply(Allowance(sphere_1d(), 2), SolutionState(np.array([0.0]), 0.0))
        assert h.search_range[0] == pytest.approx(1.0)

    def test_allowance_of_one(self):
        obj = sphere_1d()
        h = LS1()
        sol = h.apply(Allowance(obj, 1), SolutionState(np.array([-0.1]), 0.01))
        assert obj.evaluations == 1 and sol.y_best <= 0.01
        # the half step left pending is tried first next time
        assert h.pending_half_step
        h.apply(Allowance(obj, 1), sol)
        assert obj.evaluations == 2 and not h.pending_half_step

    def test_resumes_mid_pass(self):
        problem = make_problem("sphere", 7, 0)
        h = LS1(seed=0)
        h.apply(Allowance(problem, 5), start(problem, 0))
        assert h.cursor != 0

    def test_range_within_half_width(self):
        problem = make_problem("rastrigin", 4, 1)
        h = LS1()
        sol = start(problem, 1)
        for _ in range(30):
            sol = h.apply(Allowance(problem, 37), sol)
            assert np.all(h.search_range > 0)
            assert np.all(h.search_range <= 0.5 * (problem.upper - problem.lower))


class TestCC:
    def test_partition(self):
        rng = np.random.default_rng(0)
        groups = random_groups(rng, 4, 2)
        assert len(groups) == 2
        assert sorted(np.concatenate(groups).tolist()) == [0, 1, 2, 3]
        for d, s in [(10, 3), (100, 50), (7, 7), (5, 1)]:
            gs = random_groups(rng, d, s)
            assert len(gs) == -(-d // s)
            flat = np.concatenate(gs)
            assert len(flat) == d and set(flat.tolist()) == set(range(d))

    def test_embedding(self):
        ctx = np.arange(6, dtype=float)
        idx = np.array([1, 4])
        full = embed(ctx, idx, np.array([[10.0, 40.0], [11.0, 41.0]]))
        assert full.shape == (2, 6)
        mask = np.ones(6, bool)
        mask[idx] = False
        assert np.all(full[:, mask] == ctx[mask])
        assert full[1, 4] == 41.0

    def test_group_size_rule(self):
        cc = CooperativeCoevolution()
        assert cc.resolved_group_size(100) == 50
        assert cc.resolved_group_size(1000) == 100
        assert cc.resolved_group_size(3) == 2

    def test_separable_sphere_never_worse(self):
        problem = make_problem("sphere", 10, 3)
        cc = CooperativeCoevolution(seed=1)
        sol = start(problem, 3)
        ys = [sol.y_best]
        for _ in range(20):
            sol = cc.apply(Allowance(problem, 250), sol)
            ys.append(sol.y_best)
        assert all(a >= b for a, b in zip(ys, ys[1:])) and ys[-1] < ys[0]


class TestGS:
    def test_identity_edge(self):
        problem = make_problem("sphere", 5, 0)
        gs = SuccessHistoryDE(seed=2, pop_size=20, fixed_f=0.0, fixed_cr=1.0)
        sol = start(problem, 0)
        gs.apply(Allowance(problem, 20), sol)  # population evaluation only
        before = gs.snapshot()
        gs.apply(Allowance(problem, 20), sol)  # one generation
        after = gs.snapshot()
        assert np.array_equal(before["population"], after["population"])
        assert np.array_equal(before["fitness"], after["fitness"])

    def test_first_initiation_pays_population(self):
        problem = make_problem("sphere", 5, 0)
        gs = SuccessHistoryDE(seed=0)
        a = Allowance(problem, 125)
        gs.apply(a, start(problem, 0))
        assert a.spent >= 99  # NP - 1 new members, the incumbent is known

    def test_population_best_monotone(self):
        problem = make_problem("ackley", 6, 2)
        gs = SuccessHistoryDE(seed=4, pop_size=30)
        sol = start(problem, 2)
        gs.apply(Allowance(problem, 29), sol)
        best = gs.fitness.min()
        for _ in range(15):
            gs.apply(Allowance(problem, 30), sol)
            assert gs.fitness.min() <= best
            assert np.all(gs.population >= problem.lower) and np.all(gs.population <= problem.upper)
            assert len(gs.archive) <= gs.pop_size
            best = gs.fitness.min()


def test_reflect_stays_inside():
    rng = np.random.default_rng(0)
    lo, hi = np.full(3, -1.0), np.full(3, 1.0)
    x = rng.uniform(-10, 10, size=(1000, 3))
    r = reflect(x, lo, hi)
    assert np.all((r >= lo) & (r <= hi))
    inside = np.all(np.abs(x) <= 1, axis=1)
    assert np.array_equal(r[inside], x[inside])
    assert reflect(np.array([1.25]), np.array([-1.0]), np.array([1.0]))[0] == 0.75


@pytest.mark.parametrize("name", ["ls1", "cc", "gs"])
def test_contract_invariants(name):
    problem = make_problem("rastrigin", 8, 5)
    h = factories()[name](7)
    sol = start(problem, 5)
    for allowance in [100, 3, 1, 57, 200, 150, 64]:
        count = problem.evaluations
        y = sol.y_best
        a = Allowance(problem, allowance)
        sol = h.apply(a, sol)
        assert problem.evaluations - count == a.spent <= allowance
        assert sol.y_best <= y
        assert np.all(sol.x_best >= problem.lower) and np.all(sol.x_best <= problem.upper)
        assert sol.y_best == pytest.approx(problem._batch(sol.x_best[None])[0], rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("name", ["ls1", "cc", "gs"])
def test_decoupling(name):
    """Interleaving with another heuristic only matters through the incumbents X saw."""
    problem = make_problem("griewank", 6, 0)
    x_mixed = factories()[name](11)
    other = SuccessHistoryDE(seed=12, pop_size=10)
    sol = start(problem, 0)
    seen = []
    for step in range(12):
        if step % 3 == 2:
            sol = other.apply(Allowance(problem, 40), sol)
        else:
            seen.append(sol.copy())
            sol = x_mixed.apply(Allowance(problem, 60), sol)

    x_alone = factories()[name](11)
    for incumbent in seen:
        x_alone.apply(Allowance(problem, 60), incumbent.copy())
    a, b = x_mixed.snapshot(), x_alone.snapshot()
    assert a.keys() == b.keys()
    for key in a:
        if isinstance(a[key], np.ndarray):
            assert np.array_equal(a[key], b[key]), key
        elif isinstance(a[key], list):
            assert all(np.array_equal(u, v) for u, v in zip(a[key], b[key])), key
        else:
            assert a[key] == b[key], key


@pytest.mark.parametrize("name", ["ls1", "cc", "gs"])
def test_determinism(name):
    trajectories = []
    for _ in range(2):
        problem = make_problem("rosenbrock", 5, 1)
        h = factories()[name](3)
        sol = start(problem, 9)
        traj = []
        for allowance in [125] * 8:
            sol = h.apply(Allowance(problem, allowance), sol)
            traj.append((sol.y_best, sol.x_best.tobytes()))
        trajectories.append(traj)
    assert trajectories[0] == trajectories[1]


@pytest.mark.parametrize("name", ["ls1", "cc", "gs"])
def test_2d_sphere_sanity(name):
    successes = 0
    for seed in range(20):
        problem = make_problem("sphere", 2, seed)
        h = factories()[name](seed)
        sol = h.apply(Allowance(problem, 10_000), start(problem, 100 + seed))
        successes += sol.y_best < 1e-6
    assert successes >= 19


def test_registry_and_overrides():
    assert set(REGISTRY) == {"ls1", "cc", "gs"}
    cc = build_heuristic("cc", seed=1, pop_size=20, per_initiation_budget=300)
    assert cc.pop_size == 20 and cc.budget_for(100) == 300
    assert build_heuristic("ls1").budget_for(40) == 1000
    with pytest.raises(ValueError, match="unknown heuristic"):
        build_heuristic("nope")
