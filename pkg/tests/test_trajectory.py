import pytest

from estool.trajectory import (
    SACCADE_DIRECTIONS,
    Trajectory,
    displacement,
    make_trajectory,
    odg_trajectory,
    rcls_trajectory,
    saccade_trajectory,
)


class TestOdg:
    def test_fixed_positions(self):
        traj = odg_trajectory()
        assert traj.offsets == (
            (1, 0), (0, 2), (2, 1), (1, 0), (0, 1), (2, 2), (1, 0), (1, 1), (2, 1),
        )
        assert traj.steps == 8
        assert traj.kind == "odg"

    def test_first_move(self):
        assert displacement(odg_trajectory(), 1) == (-1, 2)

    def test_seventh_move(self):
        assert displacement(odg_trajectory(), 7) == (0, 1)

    def test_no_move_is_the_reverse_of_another(self):
        traj = odg_trajectory()
        moves = [displacement(traj, t) for t in range(1, 9)]
        for i, (dx, dy) in enumerate(moves):
            for j, (ex, ey) in enumerate(moves):
                if i != j:
                    assert (dx, dy) != (-ex, -ey)
        # and no move is repeated either
        assert len(set(moves)) == len(moves)

    def test_prefix_truncation(self):
        assert odg_trajectory(3).offsets == odg_trajectory().offsets[:4]
        with pytest.raises(ValueError):
            odg_trajectory(9)
        with pytest.raises(ValueError):
            odg_trajectory(0)


class TestRcls:
    def test_one_loop(self):
        assert rcls_trajectory(4).offsets == ((1, 1), (2, 1), (2, 2), (1, 2), (1, 1))

    def test_first_edge(self):
        assert rcls_trajectory(1).offsets == ((1, 1), (2, 1))

    def test_two_loops(self):
        traj = rcls_trajectory(8)
        assert len(traj.offsets) == 9
        assert traj.offsets[4:] == traj.offsets[:5]

    def test_third_move(self):
        assert displacement(rcls_trajectory(4), 3) == (-1, 0)


class TestSaccade:
    def test_deterministic_for_seed(self):
        a = saccade_trajectory(20, seed=123)
        b = saccade_trajectory(20, seed=123)
        assert a == b
        assert a.offsets != saccade_trajectory(20, seed=124).offsets

    def test_single_step_is_a_unit_move(self):
        traj = saccade_trajectory(1, seed=0)
        (x0, y0), (x1, y1) = traj.offsets
        assert (x0, y0) == (1, 1)
        assert (x1 - x0, y1 - y0) in SACCADE_DIRECTIONS

    def test_stays_on_lattice(self):
        traj = saccade_trajectory(500, seed=9)
        for ox, oy in traj.offsets:
            assert 0 <= ox <= 2 and 0 <= oy <= 2

    def test_center_moves_uniform_chi_square(self):
        # Collect moves leaving the center cell, where all 8 directions are
        # feasible; the chi-square statistic against a uniform law must stay
        # under the df=7, alpha=0.001 critical value (24.32).
        traj = saccade_trajectory(10_000, seed=42)
        counts = {d: 0 for d in SACCADE_DIRECTIONS}
        n = 0
        for (x0, y0), (x1, y1) in zip(traj.offsets, traj.offsets[1:]):
            if (x0, y0) == (1, 1):
                counts[(x1 - x0, y1 - y0)] += 1
                n += 1
        assert n > 500
        expected = n / 8
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi2 < 24.32


class TestDisplacement:
    def test_out_of_range(self):
        traj = odg_trajectory()
        with pytest.raises(ValueError):
            displacement(traj, 0)
        with pytest.raises(ValueError):
            displacement(traj, 9)


class TestConstruction:
    def test_offsets_validated(self):
        with pytest.raises(ValueError):
            Trajectory(((0, 3),), kind="odg")
        with pytest.raises(ValueError):
            Trajectory((), kind="odg")

    def test_make_by_name(self):
        assert make_trajectory("odg", 8).kind == "odg"
        assert make_trajectory("rcls", 5).kind == "rcls"
        assert make_trajectory("saccade", 5, seed=1).seed == 1
        with pytest.raises(ValueError):
            make_trajectory("zigzag", 4)
