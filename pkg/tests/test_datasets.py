import numpy as np
import pytest

from proteoknight.datasets import (
    CATEGORIES,
    IndexRow,
    SplitConfig,
    categorize,
    find_equilibrium_delta,
    read_categories,
    read_index,
    sample_category,
    stratified_split,
    write_categories,
    write_index,
)
from proteoknight.errors import DatasetError
from proteoknight.sequences import ClassLabel, ProteinSequence


def naive_delta(lengths):
    # exhaustive oracle: try every unique length, smallest wins ties
    best = None
    for cand in sorted(set(lengths)):
        le = sum(1 for n in lengths if n <= cand)
        gt = len(lengths) - le
        diff = abs(le - gt)
        if best is None or diff < best[0]:
            best = (diff, cand)
    return best[1]


def seq_of_length(n, rid="s"):
    return ProteinSequence(rid, "A" * n)


class TestEquilibriumDelta:
    def test_even_corpus(self):
        assert find_equilibrium_delta([100, 200, 300, 400, 500, 600]) == 300

    def test_single_element(self):
        assert find_equilibrium_delta([5]) == 5

    def test_empty(self):
        with pytest.raises(DatasetError):
            find_equilibrium_delta([])

    def test_nonpositive(self):
        with pytest.raises(DatasetError):
            find_equilibrium_delta([3, 0])

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(13)
        for trial in range(50):
            n = int(rng.integers(1, 400))
            lengths = rng.integers(1, 80, size=n).tolist()
            assert find_equilibrium_delta(lengths) == naive_delta(lengths)

    def test_tie_takes_smaller(self):
        # both 1 and 2 leave |1 - 1| = 0
        assert find_equilibrium_delta([1, 2]) == 1


class TestCategorize:
    def test_short_pvp(self):
        assert categorize(seq_of_length(100), ClassLabel("PVP")) == "PVP-short"

    def test_boundary_is_short(self):
        assert categorize(seq_of_length(350), ClassLabel("PVP")) == "PVP-short"
        assert categorize(seq_of_length(275), ClassLabel("non-PVP")) == "nonPVP-short"

    def test_boundary_plus_one_is_long(self):
        assert categorize(seq_of_length(351), ClassLabel("PVP")) == "PVP-long"
        assert categorize(seq_of_length(276), ClassLabel("non-PVP")) == "nonPVP-long"

    def test_multiclass_labels_use_pvp_threshold(self):
        assert categorize(seq_of_length(351), ClassLabel("Major Tail")) == "PVP-long"

    def test_partitions_corpus(self):
        rng = np.random.default_rng(14)
        cfg = SplitConfig()
        counts = dict.fromkeys(CATEGORIES, 0)
        total = 200
        for i in range(total):
            n = int(rng.integers(1, 700))
            label = ClassLabel("PVP" if rng.random() < 0.5 else "non-PVP")
            counts[categorize(seq_of_length(n), label, cfg)] += 1
        assert sum(counts.values()) == total


class TestSplitConfig:
    def test_bad_fraction(self):
        with pytest.raises(DatasetError):
            SplitConfig(test_fraction=0.0)
        with pytest.raises(DatasetError):
            SplitConfig(test_fraction=1.0)

    def test_bad_threshold(self):
        with pytest.raises(DatasetError):
            SplitConfig(delta_pvp=0)


def make_rows(spec):
    rows = []
    for label, count in spec.items():
        for i in range(count):
            rows.append(IndexRow(f"{label}-{i}", f"{label}-{i}.png", label))
    return rows


class TestStratifiedSplit:
    def test_ten_ten_at_point_two(self):
        rows = make_rows({"PVP": 10, "non-PVP": 10})
        train, test = stratified_split(rows, SplitConfig(seed=1))
        assert len(test) == 4
        assert sum(1 for r in test if r.label == "PVP") == 2
        assert sum(1 for r in test if r.label == "non-PVP") == 2

    def test_deterministic(self):
        rows = make_rows({"PVP": 31, "non-PVP": 17})
        cfg = SplitConfig(seed=42)
        assert stratified_split(rows, cfg) == stratified_split(rows, cfg)

    def test_different_seed_differs(self):
        rows = make_rows({"PVP": 31, "non-PVP": 17})
        a = stratified_split(rows, SplitConfig(seed=1))
        b = stratified_split(rows, SplitConfig(seed=2))
        assert a != b

    def test_disjoint_and_covering(self):
        rng = np.random.default_rng(15)
        for trial in range(20):
            rows = make_rows(
                {"PVP": int(rng.integers(2, 40)), "non-PVP": int(rng.integers(2, 40))}
            )
            train, test = stratified_split(rows, SplitConfig(seed=trial))
            assert len(train) + len(test) == len(rows)
            assert set(r.id for r in train).isdisjoint(r.id for r in test)
            assert sorted(r.id for r in train + test) == sorted(r.id for r in rows)

    def test_proportions_within_one(self):
        rng = np.random.default_rng(16)
        for trial in range(20):
            frac = float(rng.uniform(0.1, 0.5))
            counts = {"PVP": int(rng.integers(4, 60)), "non-PVP": int(rng.integers(4, 60))}
            rows = make_rows(counts)
            _, test = stratified_split(rows, SplitConfig(test_fraction=frac, seed=trial))
            for label, n in counts.items():
                got = sum(1 for r in test if r.label == label)
                assert abs(got - frac * n) <= 1.0

    def test_singleton_class_goes_to_train(self, caplog):
        rows = make_rows({"PVP": 10}) + [IndexRow("solo", "solo.png", "non-PVP")]
        with caplog.at_level("WARNING"):
            train, test = stratified_split(rows, SplitConfig(seed=3))
        assert any("solo" == r.id for r in train)
        assert all("solo" != r.id for r in test)
        assert "cannot be stratified" in caplog.text or "keeping in train" in caplog.text


class TestSampleCategory:
    def test_samples_distinct(self):
        rows = [IndexRow(f"s{i}", f"s{i}.png", "PVP") for i in range(200)]
        cats = {f"s{i}": "PVP-short" for i in range(200)}
        picked = sample_category(rows, cats, "PVP-short", 100, seed=0)
        assert len(picked) == 100
        assert len({r.id for r in picked}) == 100

    def test_insufficient_population(self):
        rows = [IndexRow(f"s{i}", f"s{i}.png", "PVP") for i in range(50)]
        cats = {f"s{i}": "PVP-short" for i in range(50)}
        with pytest.raises(DatasetError, match="50 records; need 100"):
            sample_category(rows, cats, "PVP-short", 100, seed=0)

    def test_seed_reproducible(self):
        rows = [IndexRow(f"s{i}", f"s{i}.png", "PVP") for i in range(30)]
        cats = {f"s{i}": ("PVP-short" if i % 2 else "PVP-long") for i in range(30)}
        a = sample_category(rows, cats, "PVP-short", 10, seed=9)
        b = sample_category(rows, cats, "PVP-short", 10, seed=9)
        assert a == b


class TestTsvIo:
    def test_index_roundtrip(self, tmp_path):
        rows = [IndexRow("a", "a.png", "PVP"), IndexRow("b", "b.png", "Major Tail")]
        path = tmp_path / "index.tsv"
        write_index(path, rows)
        assert read_index(path) == rows

    def test_index_malformed(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("too\tfew\n")
        with pytest.raises(DatasetError, match="line 1"):
            read_index(path)

    def test_categories_roundtrip(self, tmp_path):
        cats = {"a": "PVP-short", "b": "nonPVP-long"}
        path = tmp_path / "categories.tsv"
        write_categories(path, cats)
        assert read_categories(path) == cats

    def test_categories_rejects_unknown(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("a\tPVP-middling\n")
        with pytest.raises(DatasetError):
            read_categories(path)
