import warnings

import numpy as np
import pytest

from fairbalance.data import partition_subgroups
from fairbalance.errors import ReweighError
from fairbalance.oversample import (
    fos,
    interpolate,
    plan_fos,
    random_oversample,
    reweigh,
    smote,
)
from fairbalance.synth import ADULT_CELLS, GERMAN_CELLS, make_biased_dataset

from conftest import make_dataset


class TestInterpolate:
    def test_r_zero_is_base(self):
        base = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(interpolate(base, base + 1, 0.0), base)

    def test_r_one_is_neighbor(self):
        base = np.array([1.0, 2.0])
        nb = np.array([5.0, -2.0])
        np.testing.assert_array_equal(interpolate(base, nb, 1.0), nb)

    def test_quarter_point(self):
        out = interpolate(np.array([0.0, 0.0]), np.array([2.0, 4.0]), 0.25)
        np.testing.assert_array_equal(out, [0.5, 1.0])

    def test_masked_columns_copied_from_base(self):
        out = interpolate(
            np.array([0.0, 1.0]),
            np.array([2.0, 0.0]),
            0.5,
            continuous_mask=np.array([True, False]),
        )
        np.testing.assert_array_equal(out, [1.0, 1.0])

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            interpolate(np.zeros(2), np.zeros(3), 0.5)


class TestSmote:
    def test_balances_german_mirror(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=0)
        out = smote(d, seed=1)
        assert int(out.labels.sum()) == 700
        assert out.n == 1400

    def test_balanced_input_unchanged(self, eight_row_cells):
        assert smote(eight_row_cells, seed=1) is eight_row_cells

    def test_segment_membership(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=0)
        out = smote(d, seed=2)
        cont = np.array([c.kind == "continuous" for c in d.columns])
        for rec in out.records:
            b = d.features[rec.base_index][cont]
            nb = d.features[rec.neighbor_index][cont]
            s = rec.synthetic_row[cont]
            assert 0.0 <= rec.r <= 1.0
            residual = np.abs(s - (b + rec.r * (nb - b))).max()
            assert residual < 1e-9

    def test_minority_of_one_duplicates(self):
        d = make_dataset(
            [[0.0], [1.0], [2.0], [3.0]], [0, 0, 0, 1], [1, 0, 1, 0]
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out = smote(d, seed=0)
        assert any("duplicating" in str(w.message) for w in caught)
        assert int(out.labels.sum()) == 3
        for rec in out.records:
            np.testing.assert_array_equal(rec.synthetic_row, d.features[3])

    def test_original_prefix_preserved(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=3)
        out = smote(d, seed=4)
        np.testing.assert_array_equal(out.features[: d.n], d.features)
        np.testing.assert_array_equal(out.labels[: d.n], d.labels)


class TestFosPlan:
    def test_german_counts(self):
        p = partition_subgroups(make_biased_dataset(GERMAN_CELLS, seed=0))
        plan = plan_fos(p)
        assert (plan.S_pr, plan.S_up) == (308, 92)
        assert plan.D1_cell == "upmin" and plan.D2_cell == "prmin"
        assert plan.N_samp1 + plan.N_samp2 == 400

    def test_adult_counts(self):
        p = partition_subgroups(make_biased_dataset(ADULT_CELLS, seed=0))
        plan = plan_fos(p)
        assert (plan.S_pr, plan.S_up) == (12814, 12654)
        assert plan.D1_cell == "upmin"

    def test_deficit_tie_prefers_unprivileged(self):
        d = make_dataset(
            np.random.default_rng(0).normal(size=(12, 2)),
            [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
            [1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0],
        )
        plan = plan_fos(partition_subgroups(d))
        assert plan.S_pr == plan.S_up == 2
        assert plan.D1_cell == "upmin"

    def test_negative_deficit_clamped(self):
        d = make_dataset(
            np.random.default_rng(0).normal(size=(10, 2)),
            [0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
            [1, 1, 0, 0, 0, 1, 1, 1, 0, 0],
        )
        # prmin (3) exceeds prmaj (2)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            plan = plan_fos(partition_subgroups(d))
        assert plan.S_pr == 0
        assert any("clamped" in str(w.message) for w in caught)


class TestFos:
    def test_german_mirror_exact_balance(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=0)
        out = fos(d, seed=1)
        assert partition_subgroups(out).counts == (499, 201, 499, 201)
        assert int(out.labels.sum()) == 700

    def test_balanced_input_unchanged(self, eight_row_cells):
        assert fos(eight_row_cells, seed=1) is eight_row_cells

    def test_adult_mirror_exact_balance(self):
        d = make_biased_dataset(ADULT_CELLS, seed=0)
        out = fos(d, seed=1)
        assert partition_subgroups(out).counts == (22732, 14423, 22732, 14423)

    def test_phase_membership_from_records(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=0)
        part = partition_subgroups(d)
        out = fos(d, seed=5)
        d1 = set(part.idx_upmin)
        d2 = set(part.idx_prmin)
        minority = d1 | d2
        for rec in out.records:
            if rec.cell == "upmin":
                assert rec.base_index in d1 and rec.neighbor_index in d1
            else:
                assert rec.base_index in d2 and rec.neighbor_index in minority

    def test_synthetic_rows_inside_minority_bbox(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=0)
        minority = d.features[d.labels == 1]
        lo, hi = minority.min(axis=0), minority.max(axis=0)
        out = fos(d, seed=6)
        for rec in out.records:
            assert np.all(rec.synthetic_row >= lo - 1e-12)
            assert np.all(rec.synthetic_row <= hi + 1e-12)

    def test_same_seed_identical_different_seed_same_counts(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=0)
        a = fos(d, seed=7)
        b = fos(d, seed=7)
        c = fos(d, seed=8)
        np.testing.assert_array_equal(a.features, b.features)
        assert not np.array_equal(a.features, c.features)
        assert partition_subgroups(a).counts == partition_subgroups(c).counts

    def test_randomized_partitions_balance(self):
        rng = np.random.default_rng(99)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for _ in range(100):
                counts = {
                    "prmaj": int(rng.integers(3, 15)),
                    "upmaj": int(rng.integers(3, 15)),
                }
                counts["prmin"] = int(rng.integers(1, counts["prmaj"] + 1))
                counts["upmin"] = int(rng.integers(1, counts["upmaj"] + 1))
                d = make_biased_dataset(counts, n_features=3, seed=int(rng.integers(1 << 30)))
                out = fos(d, seed=int(rng.integers(1 << 30)))
                n_prmaj, n_upmaj, n_prmin, n_upmin = partition_subgroups(out).counts
                assert n_prmin == n_prmaj and n_upmin == n_upmaj


class TestRandomOversample:
    def test_counts_and_duplicates(self):
        d = make_dataset(
            np.random.default_rng(2).normal(size=(10, 3)),
            [0] * 7 + [1] * 3,
            [1, 0] * 5,
        )
        out = random_oversample(d, seed=4)
        assert int(out.labels.sum()) == 7
        originals = {tuple(row) for row in d.features[d.labels == 1]}
        for row in out.features[d.n :]:
            assert tuple(row) in originals

    def test_balanced_unchanged(self, eight_row_cells):
        assert random_oversample(eight_row_cells, seed=0) is eight_row_cells

    def test_exact_parity(self):
        d = make_biased_dataset(GERMAN_CELLS, seed=1)
        out = random_oversample(d, seed=5)
        assert int(out.labels.sum()) * 2 == out.n


class TestReweigh:
    def test_independent_cells_weight_one(self, eight_row_cells):
        out = reweigh(eight_row_cells)
        np.testing.assert_allclose(out.weights, np.ones(8))

    def test_hand_formula(self):
        d = make_dataset(
            np.random.default_rng(0).normal(size=(10, 2)),
            [0, 0, 0, 0, 0, 0, 1, 1, 1, 1],
            [1, 1, 1, 1, 0, 0, 1, 1, 0, 0],
        )
        out = reweigh(d)
        upmin = (d.labels == 1) & (d.protected == 0)
        np.testing.assert_allclose(out.weights[upmin], 0.8)

    def test_cell_total_identity(self):
        rng = np.random.default_rng(10)
        d = make_dataset(
            rng.normal(size=(40, 2)),
            rng.integers(0, 2, 40),
            rng.integers(0, 2, 40),
        )
        out = reweigh(d)
        n = d.n
        for g in (0, 1):
            for c in (0, 1):
                cell = (d.protected == g) & (d.labels == c)
                n_g = (d.protected == g).sum()
                n_c = (d.labels == c).sum()
                assert out.weights[cell].sum() == pytest.approx(n_g * n_c / n)

    def test_empty_cell_raises(self):
        d = make_dataset(
            np.random.default_rng(0).normal(size=(4, 2)), [0, 0, 1, 1], [1, 1, 1, 1]
        )
        with pytest.raises(ReweighError):
            reweigh(d)
