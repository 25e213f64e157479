"""Desk-scale smoke: fine-tuning on a 400-image toy corpus completes and
produces a well-formed metrics CSV and a loadable checkpoint. (Reference
full-corpus accuracy bands need the published dataset and GPU time; they
do not gate this suite.)"""

import pytest
import torch

from pvp_harness.config import HarnessConfig
from pvp_harness.finetune import finetune
from pvp_harness.model import activate_mcd, build_model, dropout_modules, load_checkpoint

from harness_corpus import build_corpus


@pytest.fixture(scope="module")
def big_corpus(tmp_path_factory):
    return build_corpus(tmp_path_factory.mktemp("big"), n_per_class=200)


def test_finetune_smoke_400_images(big_corpus, tmp_path):
    cfg = HarnessConfig(model="googlenet", epochs=1, input_size=96,
                        learning_rate=0.001, seed=0)
    ckpt, metrics_csv, scores = finetune(
        big_corpus / "train.tsv", big_corpus / "test.tsv", cfg, tmp_path
    )
    header, row = open(metrics_csv).read().splitlines()
    assert header == "task,n,tp,tn,fp,fn,accuracy,precision,recall,specificity,f1"
    cells = row.split(",")
    assert cells[0] == "binary"
    assert int(cells[1]) == 80  # test manifest size (40 per class)
    assert scores["accuracy"] is not None
    model, meta = load_checkpoint(ckpt)
    assert meta == {"model": "googlenet", "task": "binary", "input_size": 96}
    assert sum(p.numel() for p in model.parameters()) > 5_000_000


def test_reference_hyperparameter_defaults():
    cfg = HarnessConfig()
    assert (cfg.model, cfg.epochs, cfg.batch_size) == ("googlenet", 25, 32)
    assert (cfg.learning_rate, cfg.input_size) == (0.001, 224)


def test_dropout_scope_selection():
    model = build_model(HarnessConfig(model="googlenet", weights="none"))
    head = dropout_modules(model, "head")
    everything = dropout_modules(model, "all")
    assert len(head) == 1
    assert len(everything) >= len(head)
    activate_mcd(model, 0.3, "head")
    assert head[0].training and head[0].p == 0.3
    # the rest of the network stays in eval mode
    assert not model.conv1.training


def test_empty_train_manifest(tmp_path):
    (tmp_path / "empty.tsv").write_text("")
    (tmp_path / "test.tsv").write_text("")
    cfg = HarnessConfig(model="mobilenet_v3_small", epochs=1, input_size=64)
    with pytest.raises(ValueError, match="empty"):
        finetune(tmp_path / "empty.tsv", tmp_path / "test.tsv", cfg, tmp_path)
