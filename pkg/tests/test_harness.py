import json
import os
import stat

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from ter.cli import main
from ter.controller import random_policy_step
from ter.core import ContractViolation, RunRecord
from ter.harness import (
    AlignmentScoring,
    ExperimentConfig,
    ProblemSpec,
    build_report,
    friedman_test,
    load_results,
    paired_t_test,
    run_experiment,
    similarity_matrix,
    smith_waterman,
    tally,
)
from ter.harness.alignment import normalized_score
from ter.harness.stats import FIRST_GREATER, FIRST_SMALLER, INDISTINCT, chi2_sf, student_t_two_sided_p


def brute_sw(a, b, match=2.0, mismatch=-1.0, gap=-1.0):
    """Textbook cell-by-cell local alignment, the oracle for the row-vectorized version."""
    h = [[0.0] * (len(b) + 1) for _ in range(len(a) + 1)]
    best = 0.0
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            s = match if a[i - 1] == b[j - 1] else mismatch
            h[i][j] = max(0.0, h[i - 1][j - 1] + s, h[i - 1][j] + gap, h[i][j - 1] + gap)
            best = max(best, h[i][j])
    return best


L, C, G = 0, 1, 2


class TestSmithWaterman:
    def test_examples(self):
        assert smith_waterman([L, C, G, C], [C, G]) == 4.0
        assert smith_waterman([0, 1, 2, 1, 0], [0, 1, 2, 1, 0]) == 10.0
        assert smith_waterman([0, 0, 1], [2, 2]) == 0.0
        assert smith_waterman([], [1, 2]) == 0.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            a = rng.integers(3, size=rng.integers(0, 21)).tolist()
            b = rng.integers(3, size=rng.integers(0, 21)).tolist()
            assert smith_waterman(a, b) == brute_sw(a, b)

    @settings(max_examples=200)
    @given(
        st.lists(st.integers(0, 3), max_size=15),
        st.lists(st.integers(0, 3), max_size=15),
        st.integers(1, 5),
        st.integers(-4, 0),
        st.integers(-4, 0),
    )
    def test_arbitrary_scoring(self, a, b, m, mm, g):
        scoring = AlignmentScoring(m, mm, g)
        assert smith_waterman(a, b, scoring) == brute_sw(a, b, m, mm, g)
        assert smith_waterman(a, b, scoring) == smith_waterman(b, a, scoring)

    def test_scoring_validation(self):
        with pytest.raises(ContractViolation):
            AlignmentScoring(0, -1, -1)
        with pytest.raises(ContractViolation):
            AlignmentScoring(2, 1, -1)

    def test_normalized(self):
        assert normalized_score([0, 1, 2], [0, 1, 2, 0, 0]) == 1.0
        assert normalized_score([], [1]) == 0.0


class TestSimilarityMatrix:
    def test_examples(self):
        same = [[0, 1, 2, 0]] * 3
        assert similarity_matrix([same])[0, 0] == 8.0
        m = similarity_matrix([[[0, 0, 0], [0, 0]], [[1, 1], [1, 1, 1, 1]]])
        assert m[0, 1] == m[1, 0] == 0.0

    @settings(max_examples=50)
    @given(st.lists(st.lists(st.lists(st.integers(0, 2), max_size=10), min_size=1, max_size=3), min_size=1, max_size=4))
    def test_symmetric_non_negative(self, groups):
        m = similarity_matrix(groups)
        assert np.array_equal(m, m.T) and np.all(m >= 0)

    def test_empty_group(self):
        with pytest.raises(ContractViolation):
            similarity_matrix([[[0]], []])


class TestPairedT:
    def test_examples(self):
        r = paired_t_test([1, 2, 3], [1, 2, 3])
        assert (r.decision, r.t) == (INDISTINCT, 0.0)
        r = paired_t_test([2, 3, 4], [1, 2, 3])
        assert r.decision == FIRST_GREATER and r.t == np.inf
        # d = [-1, -1, 6], mean 4/3, sd sqrt(49/3): t = (4/3) / (sqrt(49/3)/sqrt(3)) = 4/7
        r = paired_t_test([1, 2, 10], [2, 3, 4])
        assert r.t == pytest.approx(4 / 7, abs=1e-12)
        assert r.decision == INDISTINCT

    def test_length_mismatch(self):
        with pytest.raises(ContractViolation):
            paired_t_test([1, 2], [1, 2, 3])
        with pytest.raises(ContractViolation):
            paired_t_test([1], [2])

    def test_against_scipy(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = rng.normal(size=12)
            b = a + rng.normal(0.3, 1, size=12)
            ours = paired_t_test(a, b)
            ref = sps.ttest_rel(a, b)
            assert ours.t == pytest.approx(ref.statistic, rel=1e-10)
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8, abs=1e-14)
            assert ours.decision == (INDISTINCT if ref.pvalue >= 0.05 else FIRST_SMALLER if ref.statistic < 0 else FIRST_GREATER)

    def test_tabulated_tails(self):
        # two-sided critical values: t(0.975, 5) = 2.570582, t(0.975, 19) = 2.093024
        assert student_t_two_sided_p(2.5705818366147395, 5) == pytest.approx(0.05, abs=1e-8)
        assert student_t_two_sided_p(2.093024054408263, 19) == pytest.approx(0.05, abs=1e-8)
        assert chi2_sf(5.991464547107979, 2) == pytest.approx(0.05, abs=1e-8)
        assert chi2_sf(10.0, 1) == pytest.approx(0.001565402258002549, abs=1e-12)

    def test_tally_counts(self):
        res = [paired_t_test([1, 2], [3, 4]), paired_t_test([1, 2], [1, 2]), paired_t_test([5, 6], [1, 2])]
        assert tally(res) == "1/1/1"


class TestFriedman:
    def test_identical(self):
        fr = friedman_test(np.ones((3, 5)))
        assert fr.statistic == 0.0 and np.all(fr.mean_ranks == 2.0)

    def test_dominance(self):
        fr = friedman_test(np.vstack([np.zeros(10), np.ones(10)]))
        assert fr.mean_ranks.tolist() == [1.0, 2.0]
        assert fr.statistic == pytest.approx(10.0, abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(1)
        m = rng.random((4, 6))
        a = friedman_test(m)
        b = friedman_test(np.exp(5 * m) + 3)
        assert a.statistic == b.statistic and np.array_equal(a.mean_ranks, b.mean_ranks)

    def test_against_scipy_without_ties(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            m = rng.random((4, 8))
            ours = friedman_test(m)
            ref = sps.friedmanchisquare(*m)
            assert ours.statistic == pytest.approx(ref.statistic, rel=1e-10)
            assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8)

    def test_degenerate(self):
        with pytest.raises(ContractViolation):
            friedman_test(np.ones((1, 5)))
        with pytest.raises(ContractViolation):
            friedman_test(np.ones((3, 1)))


class TestRandomPolicy:
    def test_examples(self):
        rng = np.random.default_rng(0)
        assert all(random_policy_step(1, rng) == 0 for _ in range(100))
        draws = np.array([random_policy_step(3, rng) for _ in range(10**6)])
        assert np.all(np.abs(np.bincount(draws) / draws.size - 1 / 3) < 0.002)

        def sequence():
            r = np.random.default_rng(7)
            return [random_policy_step(3, r) for _ in range(50)]

        assert sequence() == sequence()


def small_config(tmp_path=None, **kw):
    base = dict(
        problems=[ProblemSpec("sphere", 4)],
        policies=["ter", "random"],
        budget=1500,
        runs=3,
        out_dir=str(tmp_path) if tmp_path else None,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestRunExperiment:
    def test_single_run_report(self):
        results, report = run_experiment(small_config(policies=["ter"], runs=1))
        rec = results[("sphere_D4", "ter")][0]
        cell = report["summary"]["sphere_D4"]["ter"]
        assert cell["mean"] == rec.y_final and cell["std"] == 0.0
        assert report["t_tests"] == {}

    def test_one_t_test_cell(self):
        _, report = run_experiment(small_config())
        assert list(report["t_tests"]) == ["ter vs random"]
        body = report["t_tests"]["ter vs random"]
        assert sum(int(v) for v in body["string"].split("/")) == 1

    def test_rerun_bit_identical(self, tmp_path):
        run_experiment(small_config(tmp_path / "a"))
        run_experiment(small_config(tmp_path / "b"), workers=2)
        files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a" / "runs").rglob("*.json"))
        assert len(files) == 6
        for f in files:
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_report_is_pure_function_of_records(self, tmp_path):
        _, report = run_experiment(small_config(tmp_path, policies=["ter", "random", "single:ls1"]))
        again = build_report(load_results(tmp_path))
        assert json.loads(json.dumps(again)) == json.loads((tmp_path / "report" / "report.json").read_text())
        for (key, policy), recs in load_results(tmp_path).items():
            errs = np.array([r.y_final for r in recs])
            assert report["summary"][key][policy]["mean"] == float(errs.mean())
            assert report["summary"][key][policy]["std"] == float(errs.std())
            for r in recs:
                assert r.y_final == r.curve[-1][1]
        assert report["best_single"] == {"sphere_D4": "single:ls1"}

    def test_seed_rule(self):
        results, _ = run_experiment(small_config(base_seed=40))
        assert [r.seed for r in results[("sphere_D4", "ter")]] == [40, 41, 42]

    @pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
    def test_unwritable_output_nonroot(self, tmp_path):
        locked = tmp_path / "locked"
        locked.mkdir()
        locked.chmod(stat.S_IRUSR | stat.S_IXUSR)
        with pytest.raises(OSError):
            run_experiment(small_config(locked / "out"))

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        calls = []
        import ter.harness.experiment as ex

        original = ex._run_task
        ex._run_task = lambda t: calls.append(t) or original(t)
        try:
            with pytest.raises(OSError):
                run_experiment(small_config(blocker / "out"))
        finally:
            ex._run_task = original
        assert calls == []

    def test_invalid_config(self):
        with pytest.raises(ContractViolation):
            small_config(policies=["greedy"])
        with pytest.raises(ContractViolation):
            small_config(policies=["single:gs"], heuristics=["ls1", "cc"])


class TestCli:
    def test_bounds(self, capsys):
        assert main(["bounds", "--actions", "3", "--tau", "1/5", "--window", "5"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        data = json.loads(out[-1])
        assert data["lower"] == pytest.approx(0.986703, abs=1e-6)
        assert data["complement_lower"] == pytest.approx(0.013297, abs=1e-6)

    def test_solve(self, capsys):
        assert main(["solve-hparams", "--pmin", "0.5", "--pmax", "0.9999", "--actions", "3"]) == 0
        data = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert data["candidates"][0]["tau"] <= 0.2

    def test_run_and_report(self, tmp_path, capsys):
        out = tmp_path / "exp"
        code = main(["run", "--problem", "sphere,rastrigin", "--dim", "3", "--budget", "600", "--runs", "2",
                     "--policy", "ter", "--policy", "random", "--out", str(out)])
        assert code == 0
        assert (out / "report" / "summary.csv").exists()
        assert len(list((out / "runs").rglob("run_*.csv"))) == 8
        assert main(["report", "--in", str(out), "--out", str(tmp_path / "rep")]) == 0
        rep = json.loads((tmp_path / "rep" / "report" / "report.json").read_text())
        assert rep["t_tests"]["ter vs random"]["string"].count("/") == 2
        assert len(list((tmp_path / "rep" / "report" / "curves").rglob("*.csv"))) == 8

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "c.toml"
        cfg.write_text('[policy]\ntau = "1/6"\nwindow = 6\n[gs]\npop_size = 12\n')
        out = tmp_path / "o"
        assert main(["run", "--problem", "sphere", "--dim", "2", "--budget", "300", "--runs", "1",
                     "--config", str(cfg), "--out", str(out)]) == 0
        rec = RunRecord.load_json(next((out / "runs").rglob("run_000.json")))
        assert rec.config["window"] == 6 and rec.config["tau"] == pytest.approx(1 / 6)

    @pytest.mark.parametrize(
        "argv",
        [
            ["bounds", "--actions", "3", "--tau", "0.2", "--window", "2"],
            ["run", "--problem", "nope", "--dim", "3", "--runs", "1"],
            ["report", "--in", "/nonexistent/dir"],
            ["run", "--problem", "sphere", "--dim", "3", "--shift-file", "/nonexistent/shift.txt", "--runs", "1"],
        ],
    )
    def test_errors_exit_nonzero(self, argv, capsys):
        assert main(argv) != 0
        assert "ter: error:" in capsys.readouterr().err
