"""Every record the harness emits must parse under the analyzer's reader
with zero warnings, and the analyzer's report command must consume the
file unmodified."""

import json
import logging

import pytest
from proteoknight.cli import main as analyzer_main
from proteoknight.uncertainty import analyze_records, read_predictions

from pvp_harness.config import HarnessConfig
from pvp_harness.finetune import finetune
from pvp_harness.mcd import mcd_infer


@pytest.fixture(scope="module")
def checkpoint(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("ckpt")
    cfg = HarnessConfig(model="mobilenet_v3_small", epochs=0, input_size=64, seed=0)
    ckpt, _, _ = finetune(corpus / "train.tsv", corpus / "test.tsv", cfg, out)
    return ckpt


@pytest.fixture(scope="module")
def predictions(checkpoint, corpus, tmp_path_factory):
    path = tmp_path_factory.mktemp("mcd") / "predictions.jsonl"
    n = mcd_infer(checkpoint, corpus / "index.tsv", corpus / "categories.tsv",
                  path, passes=4, rate=0.2, samples_per_category=2, seed=1)
    assert n == 4 * 2 * 4  # categories x samples x passes
    return path


def test_parses_with_zero_warnings(predictions, caplog):
    with caplog.at_level(logging.WARNING):
        records = read_predictions(predictions)
    assert not caplog.records
    assert len(records) == 32


def test_exact_record_keys(predictions):
    for line in predictions.read_text().splitlines():
        assert list(json.loads(line)) == [
            "id", "category", "dropout_rate", "pass_index", "probs"
        ]


def test_analyzer_report_consumes_unmodified(predictions, tmp_path):
    out = tmp_path / "report"
    assert analyzer_main(["report", "--predictions", str(predictions),
                          "--out", str(out)]) == 0
    lines = (out / "report.csv").read_text().splitlines()
    assert len(lines) == 1 + 4  # header + one row per category


def test_rate_zero_gives_exact_zero_variance(checkpoint, corpus, tmp_path):
    path = tmp_path / "rate0.jsonl"
    mcd_infer(checkpoint, corpus / "index.tsv", corpus / "categories.tsv",
              path, passes=5, rate=0.0, samples_per_category=2, seed=1)
    report = analyze_records(read_predictions(path))
    assert len(report) == 4
    for row in report:
        assert row.variance == 0.0


def test_nonzero_rate_spreads_passes(checkpoint, corpus, tmp_path):
    path = tmp_path / "rate5.jsonl"
    mcd_infer(checkpoint, corpus / "index.tsv", corpus / "categories.tsv",
              path, passes=20, rate=0.5, samples_per_category=2, seed=1)
    report = analyze_records(read_predictions(path))
    assert any(row.variance > 0.0 for row in report)
