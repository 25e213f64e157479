"""Harness metrics must equal the analyzer package's metrics op to 1e-9."""

import numpy as np
from proteoknight.metrics import ConfusionCounts, metrics as analyzer_metrics

from pvp_harness.metrics import ratios


def test_parity_on_random_confusions():
    rng = np.random.default_rng(0)
    for _ in range(500):
        tp, tn, fp, fn = (int(v) for v in rng.integers(0, 200, 4))
        ours = ratios(tp, tn, fp, fn)
        theirs = analyzer_metrics(ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn))
        assert set(ours) == set(theirs)
        for key, val in theirs.items():
            if val is None:
                assert ours[key] is None
            else:
                assert abs(ours[key] - val) < 1e-9


def test_parity_on_reference_row():
    # precision 0.83 / recall 0.91 gives the F1 that rounds to 0.87
    ours = ratios(tp=91, tn=0, fp=int(round(91 / 0.83 - 91)), fn=9)
    assert abs(ours["precision"] - 0.83) < 0.005
    assert abs(ours["recall"] - 0.91) < 1e-12
    assert round(ours["f1"], 2) == 0.87
