"""Spatial sampling and torus nearest-station assignment."""

import numpy as np
import numpy.testing as npt
import pytest

from cellcast import (
    CellCensus,
    DegenerateInputError,
    ParameterError,
    PointPattern,
    Role,
    Window,
    assign_nearest,
    sample_ppp,
    snapshot_export,
    substream,
    thin,
)


def oracle_assign(upts, bpts, side):
    """Exhaustive all-pairs wraparound scan; first minimum wins ties."""
    out = []
    for ux, uy in upts:
        best_d2, best_i = None, -1
        for i, (bx, by) in enumerate(bpts):
            dx = abs(ux - bx)
            dx = min(dx, side - dx)
            dy = abs(uy - by)
            dy = min(dy, side - dy)
            d2 = dx * dx + dy * dy
            if best_d2 is None or d2 < best_d2:
                best_d2, best_i = d2, i
        out.append(best_i)
    return np.array(out, dtype=np.int64)


def pattern(points, side, role=Role.MU):
    return PointPattern(points=np.asarray(points, dtype=float), role=role, window=Window(side))


class TestSamplePpp:
    def test_mean_count_matches_intensity(self):
        rng = substream(11, 0)
        win = Window(10.0)
        counts = [len(sample_ppp(1.0, win, rng)) for _ in range(1000)]
        mean = np.mean(counts)
        se = np.sqrt(100.0 / 1000.0)
        assert abs(mean - 100.0) < 4 * se

    def test_empty_draw_is_valid(self):
        pat = sample_ppp(1e-9, Window(1.0), substream(0, 0))
        assert len(pat) == 0
        assert pat.points.shape == (0, 2)

    def test_deterministic_for_fixed_stream(self):
        a = sample_ppp(5.0, Window(20.0), substream(123, 4))
        b = sample_ppp(5.0, Window(20.0), substream(123, 4))
        npt.assert_array_equal(a.points, b.points)

    def test_coordinates_inside_window(self):
        pat = sample_ppp(50.0, Window(3.0), substream(5, 1))
        assert np.all(pat.points >= 0.0) and np.all(pat.points < 3.0)

    def test_rejects_bad_density(self):
        with pytest.raises(ParameterError):
            sample_ppp(0.0, Window(1.0), substream(0, 0))
        with pytest.raises(ParameterError):
            sample_ppp(-2.0, Window(1.0), substream(0, 0))


class TestThin:
    def test_alpha_zero_empties(self):
        pat = sample_ppp(10.0, Window(5.0), substream(7, 0))
        assert len(thin(pat, 0.0, substream(7, 1))) == 0

    def test_alpha_one_is_identity(self):
        pat = sample_ppp(10.0, Window(5.0), substream(7, 0))
        kept = thin(pat, 1.0, substream(7, 1))
        npt.assert_array_equal(kept.points, pat.points)

    def test_retention_rate(self):
        pts = substream(13, 0).uniform(0, 100.0, size=(10**6, 2))
        pat = pattern(pts, 100.0)
        kept = thin(pat, 0.5, substream(13, 1))
        assert abs(len(kept) / 10**6 - 0.5) < 0.002  # 3 sigma of Binomial

    def test_thinned_density_matches_direct_sampling(self):
        win = Window(20.0)
        thinned, direct = [], []
        for rep in range(300):
            pat = sample_ppp(4.0, win, substream(17, rep, 0))
            thinned.append(len(thin(pat, 0.25, substream(17, rep, 1))))
            direct.append(len(sample_ppp(1.0, win, substream(18, rep))))
        # both are Poisson(400); compare means within 5 joint standard errors
        se = np.sqrt(2 * 400.0 / 300)
        assert abs(np.mean(thinned) - np.mean(direct)) < 5 * se

    def test_rejects_alpha_outside_unit_interval(self):
        pat = sample_ppp(1.0, Window(5.0), substream(1, 0))
        for bad in (-0.1, 1.1):
            with pytest.raises(ParameterError):
                thin(pat, bad, substream(1, 1))


class TestAssignNearest:
    def test_single_station_takes_all(self):
        bss = pattern([(5.0, 5.0)], 10.0, Role.BS)
        users = pattern(substream(3, 0).uniform(0, 10.0, size=(7, 2)), 10.0)
        census = assign_nearest(users, bss)
        npt.assert_array_equal(census.counts, [7])
        npt.assert_array_equal(census.assignments, [0] * 7)

    def test_no_users_gives_zero_counts(self):
        bss = pattern([(1.0, 1.0), (8.0, 8.0)], 10.0, Role.BS)
        census = assign_nearest(pattern(np.empty((0, 2)), 10.0), bss)
        npt.assert_array_equal(census.counts, [0, 0])

    def test_two_station_example(self):
        # torus distances 1.5 vs 3.5: station 0 serves the user
        bss = pattern([(2.5, 5.0), (7.5, 5.0)], 10.0, Role.BS)
        census = assign_nearest(pattern([(4.0, 5.0)], 10.0), bss)
        assert census.assignments[0] == 0
        npt.assert_array_equal(
            census.assignments, oracle_assign([(4.0, 5.0)], bss.points, 10.0)
        )

    def test_wraparound_beats_straight_line(self):
        # station 0 is 0.6 away across the border, station 1 is 2.4 direct
        bss = pattern([(0.5, 5.0), (7.5, 5.0)], 10.0, Role.BS)
        census = assign_nearest(pattern([(9.9, 5.0)], 10.0), bss)
        assert census.assignments[0] == 0

    def test_matches_oracle_small_patterns(self):
        for seed in range(20):
            rng = substream(100, seed)
            n_b = int(rng.integers(1, 8))
            n_u = int(rng.integers(0, 50))
            side = float(rng.uniform(1.0, 20.0))
            bpts = rng.uniform(0, side, size=(n_b, 2))
            upts = rng.uniform(0, side, size=(n_u, 2))
            census = assign_nearest(pattern(upts, side), pattern(bpts, side, Role.BS))
            npt.assert_array_equal(census.assignments, oracle_assign(upts, bpts, side))

    def test_grid_matches_bruteforce_large_pattern(self):
        rng = substream(200, 0)
        side = 25.0
        bpts = rng.uniform(0, side, size=(400, 2))
        upts = rng.uniform(0, side, size=(3000, 2))
        census = assign_nearest(pattern(upts, side), pattern(bpts, side, Role.BS))
        delta = np.abs(upts[:, None, :] - bpts[None, :, :])
        delta = np.minimum(delta, side - delta)
        ref = np.argmin(delta[..., 0] ** 2 + delta[..., 1] ** 2, axis=1)
        npt.assert_array_equal(census.assignments, ref)

    def test_census_conserves_users(self):
        for seed in range(5):
            bss = sample_ppp(2.0, Window(15.0), substream(300, seed, 0), role=Role.BS)
            users = sample_ppp(5.0, Window(15.0), substream(300, seed, 1))
            census = assign_nearest(users, bss)
            assert census.counts.sum() == len(users)
            assert len(census.counts) == len(bss)

    def test_translation_invariance_on_torus(self):
        rng = substream(400, 0)
        side = 12.0
        bpts = rng.uniform(0, side, size=(60, 2))
        upts = rng.uniform(0, side, size=(500, 2))
        base = assign_nearest(pattern(upts, side), pattern(bpts, side, Role.BS))
        for shift in ((3.7, 0.0), (0.0, 9.1), (5.5, 2.2)):
            b2 = np.mod(bpts + shift, side)
            u2 = np.mod(upts + shift, side)
            moved = assign_nearest(pattern(u2, side), pattern(b2, side, Role.BS))
            npt.assert_array_equal(np.sort(moved.counts), np.sort(base.counts))

    def test_tie_breaks_to_lowest_index(self):
        # two stations equidistant from the user by construction
        bss = pattern([(2.0, 5.0), (8.0, 5.0)], 10.0, Role.BS)
        census = assign_nearest(pattern([(5.0, 5.0)], 10.0), bss)
        assert census.assignments[0] == 0

    def test_empty_station_pattern_is_degenerate(self):
        users = pattern([(1.0, 1.0)], 10.0)
        with pytest.raises(DegenerateInputError):
            assign_nearest(users, pattern(np.empty((0, 2)), 10.0, Role.BS))

    def test_window_mismatch_rejected(self):
        users = pattern([(1.0, 1.0)], 10.0)
        bss = pattern([(1.0, 1.0)], 11.0, Role.BS)
        with pytest.raises(ParameterError):
            assign_nearest(users, bss)


class TestCellCensus:
    def test_counts_must_tally(self):
        with pytest.raises(ParameterError):
            CellCensus(counts=np.array([2, 1]), assignments=np.array([0, 0, 0]))
        with pytest.raises(ParameterError):
            CellCensus(counts=np.array([1]), assignments=np.array([3]))


class TestSnapshotExport:
    def test_one_station_one_user(self):
        bss = pattern([(2.0, 3.0)], 10.0, Role.BS)
        users = pattern([(4.0, 5.0)], 10.0)
        census = assign_nearest(users, bss)
        text = snapshot_export(bss, users, census)
        lines = text.strip().split("\n")
        assert lines[0] == "role,x,y,cell"
        assert lines[1] == "bs,2,3,"
        assert lines[2] == "mu,4,5,0"

    def test_station_rows_only_when_no_users(self):
        bss = pattern([(1.0, 1.0), (2.0, 2.0)], 10.0, Role.BS)
        users = pattern(np.empty((0, 2)), 10.0)
        census = assign_nearest(users, bss)
        lines = snapshot_export(bss, users, census).strip().split("\n")
        assert len(lines) == 3
        assert all(line.startswith("bs,") for line in lines[1:])

    def test_row_ratio_tracks_density_ratio(self):
        n_bs = n_mu = 0
        win = Window(10.0)
        for rep in range(200):
            bss = sample_ppp(1.0, win, substream(77, rep, 0), role=Role.BS)
            users = sample_ppp(3.0, win, substream(77, rep, 1))
            n_bs += len(bss)
            n_mu += len(users)
        assert abs(n_mu / n_bs - 3.0) < 0.1

    def test_inconsistent_inputs_rejected(self):
        bss = pattern([(1.0, 1.0)], 10.0, Role.BS)
        users = pattern([(2.0, 2.0)], 10.0)
        census = assign_nearest(users, bss)
        other_users = pattern([(2.0, 2.0), (3.0, 3.0)], 10.0)
        with pytest.raises(ParameterError):
            snapshot_export(bss, other_users, census)


class TestWindow:
    def test_area(self):
        assert Window(4.0).area == 16.0

    def test_rejects_nonpositive_side(self):
        for bad in (0.0, -1.0):
            with pytest.raises(ParameterError):
                Window(bad)


def test_points_outside_window_rejected():
    with pytest.raises(ParameterError):
        pattern([(0.0, 10.0)], 10.0)
    with pytest.raises(ParameterError):
        pattern([(-0.1, 5.0)], 10.0)
