import numpy as np

from proteoknight.sequences import RESIDUE_ALPHABET, ProteinSequence

# Disjoint residue pools: PVP sequences draw from the first half of the
# alphabet, non-PVP from the second, so their images share no colors.
PVP_POOL = RESIDUE_ALPHABET[:10]
NONPVP_POOL = RESIDUE_ALPHABET[10:]


def random_sequence(rng, rid, min_len=1, max_len=200, pool=RESIDUE_ALPHABET):
    n = int(rng.integers(min_len, max_len + 1))
    residues = "".join(pool[i] for i in rng.integers(0, len(pool), size=n))
    return ProteinSequence(rid, residues)


def toy_corpus(n_per_category=25, seed=7):
    """Two-class corpus with disjoint residue statistics and all four
    length categories populated (default thresholds 350 / 275)."""
    rng = np.random.default_rng(seed)
    seqs, labels = [], {}
    spans = [
        ("PVP", PVP_POOL, (40, 350), "ps"),
        ("PVP", PVP_POOL, (351, 600), "pl"),
        ("non-PVP", NONPVP_POOL, (40, 275), "ns"),
        ("non-PVP", NONPVP_POOL, (276, 600), "nl"),
    ]
    for label, pool, (lo, hi), tag in spans:
        for i in range(n_per_category):
            seq = random_sequence(rng, f"{tag}{i:03d}", lo, hi, pool)
            seqs.append(seq)
            labels[seq.id] = label
    return seqs, labels
