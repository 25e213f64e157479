import math

import numpy as np
import pytest

from proteoknight import png
from proteoknight.encoding import (
    DEFAULT_COLORS,
    DEFAULT_TABLE,
    AngleColorTable,
    EncodingConfig,
    displacement,
    encode,
    encode_corpus,
    walk,
)
from proteoknight.errors import EncodingError
from proteoknight.sequences import RESIDUE_ALPHABET, ProteinSequence

from corpus_helpers import random_sequence

# 15 * cos(18 deg), 15 * sin(18 deg) evaluated with mpmath at 50 digits
C_DX = 14.265847744427303581746590000690732
C_DY = 4.63525491562421136153440125774228588


def expected_disk(cx, cy, point_size, m):
    pts = set()
    for dy in range(-point_size, point_size + 1):
        for dx in range(-point_size, point_size + 1):
            if dx * dx + dy * dy <= point_size * point_size:
                px, py = cx + dx, cy + dy
                if 0 <= px < m and 0 <= py < m:
                    pts.add((px, py))
    return pts


class TestAngleColorTable:
    def test_angles_are_multiples_of_18(self):
        degs = [DEFAULT_TABLE.angle_degrees(aa) for aa in RESIDUE_ALPHABET]
        assert degs == [18.0 * i for i in range(20)]
        assert len(set(degs)) == 20

    def test_worked_angles(self):
        assert DEFAULT_TABLE.angle_degrees("C") == 18.0
        assert DEFAULT_TABLE.angle_degrees("G") == 90.0

    def test_palette_pinned(self):
        assert DEFAULT_TABLE.color("A") == (255, 0, 0)
        assert DEFAULT_TABLE.color("W") == (204, 204, 204)
        assert DEFAULT_TABLE.color("Y") == (0, 64, 255)
        assert len(DEFAULT_COLORS) == 20

    def test_unknown_residue(self):
        with pytest.raises(EncodingError):
            DEFAULT_TABLE.color("X")

    def test_incomplete_palette_rejected(self):
        colors = dict(DEFAULT_COLORS)
        del colors["A"]
        with pytest.raises(EncodingError, match="missing"):
            AngleColorTable(colors)


class TestDisplacement:
    def test_a_is_straight_right(self):
        assert displacement("A", r=15) == (15.0, 0.0)

    def test_g_is_straight_up(self):
        dx, dy = displacement("G", r=15)
        assert abs(dx) < 1e-9
        assert abs(dy - 15.0) < 1e-9

    def test_c_against_high_precision_oracle(self):
        dx, dy = displacement("C", r=15)
        assert abs(dx - C_DX) < 1e-12
        assert abs(dy - C_DY) < 1e-12

    def test_unknown_residue(self):
        with pytest.raises(EncodingError):
            displacement("B")


class TestWalk:
    def test_single_a_center(self):
        steps = walk(ProteinSequence("s", "A"))
        assert steps[0].center == (271, 256)

    def test_ac_centers(self):
        steps = walk(ProteinSequence("s", "AC"))
        assert [s.center for s in steps] == [(271, 256), (285, 251)]

    def test_all_a_reset_and_clip_semantics(self):
        # 17 stamps marching right, an off-raster skip, then a guard reset
        steps = walk(ProteinSequence("s", "A" * 19))
        assert [s.center for s in steps[:17]] == [
            (256 + 15 * (k + 1), 256) for k in range(17)
        ]
        assert steps[17].center is None  # x = 526 > raster, stamp skipped
        assert not steps[17].reset_x  # guard saw x = 511 <= 512
        assert steps[18].reset_x  # guard saw x = 526 > 512
        assert steps[18].center == (271, 256)

    @pytest.mark.parametrize("m", [64, 128, 512])
    def test_all_a_matches_brute_force_trace(self, m):
        # independent straight-line recurrence for the all-'A' walk
        cfg = EncodingConfig(size=m)
        n = 3 * m // 15
        steps = walk(ProteinSequence("s", "A" * n), cfg)
        x = m / 2.0
        for step in steps:
            if x < 0 or x > m:
                x = m / 2.0
                assert step.reset_x
            else:
                assert not step.reset_x
            x += 15.0
            assert step.x == x  # exact: same double-precision recurrence
            assert step.y == m / 2.0

    def test_consecutive_steps_r_apart(self):
        rng = np.random.default_rng(5)
        cfg = EncodingConfig()
        for i in range(20):
            seq = random_sequence(rng, f"s{i}", 50, 200)
            steps = walk(seq, cfg)
            for prev, cur in zip(steps, steps[1:]):
                if cur.reset_x or cur.reset_y:
                    continue
                d = math.hypot(cur.x - prev.x, cur.y - prev.y)
                assert abs(d - cfg.radius) < 1e-9

    def test_positions_in_bounds_after_reset_check(self):
        rng = np.random.default_rng(6)
        cfg = EncodingConfig(size=64)
        for i in range(10):
            seq = random_sequence(rng, f"s{i}", 100, 400)
            prev_xy = (32.0, 32.0)
            for step in walk(seq, cfg):
                x, y = prev_xy
                if step.reset_x:
                    assert x < 0 or x > 64
                if step.reset_y:
                    assert y < 0 or y > 64
                prev_xy = (step.x, step.y)


class TestEncode:
    def test_single_a_disk(self):
        img = encode(ProteinSequence("s", "A"))
        lit = set(zip(*np.nonzero(img.pixels.any(axis=2))[::-1]))
        assert lit == expected_disk(271, 256, 2, 512)
        assert tuple(img.pixels[256, 271]) == (255, 0, 0)

    def test_ac_two_disks(self):
        img = encode(ProteinSequence("s", "AC"))
        assert tuple(img.pixels[256, 271]) == (255, 0, 0)
        assert tuple(img.pixels[251, 285]) == (255, 255, 0)
        lit = set(zip(*np.nonzero(img.pixels.any(axis=2))[::-1]))
        assert lit == expected_disk(271, 256, 2, 512) | expected_disk(285, 251, 2, 512)

    def test_determinism(self):
        rng = np.random.default_rng(7)
        seq = random_sequence(rng, "s", 200, 400)
        a = encode(seq)
        b = encode(seq)
        assert np.array_equal(a.pixels, b.pixels)

    def test_palette_closure(self):
        rng = np.random.default_rng(8)
        for i in range(10):
            seq = random_sequence(rng, f"s{i}", 20, 150)
            img = encode(seq)
            used = {DEFAULT_TABLE.color(ch) for ch in seq.residues} | {(0, 0, 0)}
            present = {tuple(px) for px in img.pixels.reshape(-1, 3)}
            assert present <= used

    def test_recoloring_moves_no_centers(self):
        rng = np.random.default_rng(9)
        shuffled = dict(zip(RESIDUE_ALPHABET, [DEFAULT_COLORS[a] for a in
                                               reversed(RESIDUE_ALPHABET)]))
        other = AngleColorTable(shuffled)
        for i in range(10):
            seq = random_sequence(rng, f"s{i}", 50, 200)
            a = [s.center for s in walk(seq, table=DEFAULT_TABLE)]
            b = [s.center for s in walk(seq, table=other)]
            assert a == b

    def test_stamp_count_bounded_by_length(self):
        rng = np.random.default_rng(10)
        for i in range(10):
            seq = random_sequence(rng, f"s{i}", 100, 500)
            stamped = [s for s in walk(seq, EncodingConfig(size=64)) if s.center]
            assert len(stamped) <= len(seq)

    def test_edge_disk_clipped_not_reset(self):
        # center in-bounds but near the border: disk pixels clip at the edge
        cfg = EncodingConfig(size=64)
        seq = ProteinSequence("s", "A" * 4)  # stamps at x = 47, 62; then skip
        steps = walk(seq, cfg)
        assert steps[1].center == (62, 32)
        img = encode(seq, cfg)
        lit = set(zip(*np.nonzero(img.pixels.any(axis=2))[::-1]))
        assert lit == expected_disk(47, 32, 2, 64) | expected_disk(62, 32, 2, 64)

    def test_background_configurable(self):
        img = encode(ProteinSequence("s", "A"), EncodingConfig(background=(9, 9, 9)))
        assert tuple(img.pixels[0, 0]) == (9, 9, 9)


class TestEncodingConfig:
    def test_too_small_raster(self):
        with pytest.raises(EncodingError, match="too small"):
            EncodingConfig(size=16)

    def test_bad_radius(self):
        with pytest.raises(EncodingError):
            EncodingConfig(radius=0)

    def test_bad_point_size(self):
        with pytest.raises(EncodingError):
            EncodingConfig(point_size=0)


class TestEncodeCorpus:
    def test_three_sequences(self, tmp_path):
        rng = np.random.default_rng(11)
        seqs = [random_sequence(rng, f"s{i}", 10, 40) for i in range(3)]
        rows = encode_corpus(seqs, EncodingConfig(size=64), tmp_path,
                             labels={s.id: "PVP" for s in seqs})
        assert len(rows) == 3
        for rid, path, label in rows:
            assert (tmp_path / path).exists()
            assert label == "PVP"
        index = (tmp_path / "index.tsv").read_text().splitlines()
        assert len(index) == 3
        assert index[0] == "s0\ts0.png\tPVP"

    def test_empty_corpus(self, tmp_path):
        rows = encode_corpus([], EncodingConfig(size=64), tmp_path)
        assert rows == []
        assert (tmp_path / "index.tsv").read_text() == ""

    def test_unwritable_dir(self, tmp_path):
        target = tmp_path / "ro"
        target.mkdir()
        target.chmod(0o500)
        seqs = [ProteinSequence("s", "ACD")]
        try:
            with pytest.raises(EncodingError):
                encode_corpus(seqs, EncodingConfig(size=64), target, strict=True)
        finally:
            target.chmod(0o700)

    def test_missing_label_warns_or_fails(self, tmp_path, caplog):
        seqs = [ProteinSequence("s", "ACD")]
        rows = encode_corpus(seqs, EncodingConfig(size=64), tmp_path, labels={})
        assert rows[0][2] == "unknown"
        with pytest.raises(EncodingError, match="no label"):
            encode_corpus(seqs, EncodingConfig(size=64), tmp_path, labels={},
                          strict=True)

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        rng = np.random.default_rng(12)
        seqs = [random_sequence(rng, f"s{i}", 20, 120) for i in range(12)]
        one = tmp_path / "w1"
        many = tmp_path / "w4"
        encode_corpus(seqs, EncodingConfig(size=64), one, jobs=1)
        encode_corpus(seqs, EncodingConfig(size=64), many, jobs=4)
        assert (one / "index.tsv").read_bytes() == (many / "index.tsv").read_bytes()
        for seq in seqs:
            assert (one / f"{seq.id}.png").read_bytes() == (
                many / f"{seq.id}.png"
            ).read_bytes()

    def test_pngs_decode_to_encoded_pixels(self, tmp_path):
        seq = ProteinSequence("s0", "ACDEFG")
        cfg = EncodingConfig(size=64)
        encode_corpus([seq], cfg, tmp_path)
        assert np.array_equal(
            png.read_rgb(tmp_path / "s0.png"), encode(seq, cfg).pixels
        )
