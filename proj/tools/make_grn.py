#!/usr/bin/env python3
"""Regenerates data/grn_v1.json, the bundled 51-gene regulatory network.

The curated edges below are kept as-is (signs fixed, magnitudes drawn); the
remaining edges up to EDGE_TARGET are sampled within and across pathways.
Weights are rescaled so that the spectral radius of |W| is 0.8, which bounds
the spectral radius of every knockout-clamped signed system as well.
Knockout effects are propagated on log2 expression, so no basal vector is
stored.

    python3 tools/make_grn.py > data/grn_v1.json
"""

import json
import sys

import numpy as np

SEED = 20240501
EDGE_TARGET = 100
SPECTRAL_RADIUS = 0.8

PATHWAYS = {
    "cell_cycle": ["CDK1", "CDK2", "CDK4", "CDK6", "CCND1", "CCNE1",
                   "CDKN1A", "CDKN2A", "RB1", "E2F1"],
    "apoptosis": ["TP53", "MDM2", "BAX", "BCL2", "BCL2L1", "CASP3",
                  "CASP8", "CASP9", "APAF1"],
    "mapk_pi3k_signaling": ["EGFR", "KRAS", "BRAF", "MEK1", "ERK2",
                            "PIK3CA", "AKT1", "MTOR", "PTEN"],
    "transcription_factors": ["MYC", "JUN", "FOS", "STAT3", "NFKB1", "HIF1A"],
    "dna_repair": ["ATM", "ATR", "CHEK1", "CHEK2", "BRCA1", "BRCA2", "PARP1"],
    "epigenetic": ["EZH2", "DNMT1", "HDAC1", "KDM5A", "SETD2"],
    "metabolism": ["HK2", "PKM", "LDHA", "GLS", "IDH1"],
}

# (source, target, sign)
CURATED = [
    ("TP53", "CDKN1A", +1), ("TP53", "MDM2", +1), ("MDM2", "TP53", -1),
    ("TP53", "BAX", +1), ("TP53", "APAF1", +1), ("TP53", "BCL2", -1),
    ("KRAS", "BRAF", +1), ("BRAF", "MEK1", +1), ("MEK1", "ERK2", +1),
    ("ERK2", "FOS", +1), ("ERK2", "JUN", +1), ("ERK2", "MYC", +1),
    ("EGFR", "KRAS", +1), ("EGFR", "PIK3CA", +1), ("PIK3CA", "AKT1", +1),
    ("PTEN", "AKT1", -1), ("AKT1", "MTOR", +1), ("AKT1", "MDM2", +1),
    ("AKT1", "BAX", -1), ("MTOR", "HIF1A", +1), ("HIF1A", "HK2", +1),
    ("HIF1A", "LDHA", +1), ("HIF1A", "PKM", +1), ("MYC", "CCND1", +1),
    ("MYC", "CDK4", +1), ("MYC", "LDHA", +1), ("MYC", "GLS", +1),
    ("CCND1", "CDK4", +1), ("CCND1", "CDK6", +1), ("CDK4", "RB1", -1),
    ("CDK6", "RB1", -1), ("RB1", "E2F1", -1), ("E2F1", "CCNE1", +1),
    ("CCNE1", "CDK2", +1), ("CDK2", "CDK1", +1), ("CDKN1A", "CDK2", -1),
    ("CDKN1A", "CDK4", -1), ("CDKN2A", "CDK4", -1), ("CDKN2A", "CDK6", -1),
    ("ATM", "CHEK2", +1), ("ATM", "TP53", +1), ("ATR", "CHEK1", +1),
    ("CHEK2", "TP53", +1), ("CHEK1", "CDK1", -1), ("BRCA1", "PARP1", +1),
    ("BCL2", "CASP9", -1), ("BCL2L1", "CASP9", -1), ("BAX", "CASP9", +1),
    ("APAF1", "CASP9", +1), ("CASP9", "CASP3", +1), ("CASP8", "CASP3", +1),
    ("STAT3", "BCL2L1", +1), ("STAT3", "MYC", +1), ("NFKB1", "BCL2", +1),
    ("EZH2", "CDKN2A", -1), ("DNMT1", "CDKN2A", -1), ("HDAC1", "CDKN1A", -1),
    ("IDH1", "KDM5A", -1), ("E2F1", "EZH2", +1), ("E2F1", "BRCA1", +1),
]


def main() -> int:
    rng = np.random.default_rng(SEED)
    genes = [g for members in PATHWAYS.values() for g in members]
    assert len(genes) == 51 and len(set(genes)) == 51
    index = {g: i for i, g in enumerate(genes)}
    pathway_of = {g: p for p, members in PATHWAYS.items() for g in members}

    edges = {}
    for src, dst, sign in CURATED:
        edges[(src, dst)] = sign * rng.uniform(0.5, 1.0)
    while len(edges) < EDGE_TARGET:
        src = genes[rng.integers(len(genes))]
        if rng.uniform() < 0.6:
            same = PATHWAYS[pathway_of[src]]
            dst = same[rng.integers(len(same))]
        else:
            dst = genes[rng.integers(len(genes))]
        if src == dst or (src, dst) in edges or (dst, src) in edges:
            continue
        sign = 1.0 if rng.uniform() < 0.65 else -1.0
        edges[(src, dst)] = sign * rng.uniform(0.2, 0.8)

    w = np.zeros((51, 51))
    for (src, dst), weight in edges.items():
        w[index[dst], index[src]] = weight
    rho = max(abs(np.linalg.eigvals(np.abs(w))))
    scale = SPECTRAL_RADIUS / rho

    doc = {
        "schema_version": 1,
        "name": "grn_v1",
        "generator_seed": SEED,
        "abs_spectral_radius": SPECTRAL_RADIUS,
        "noise_scale": 0.05,
        "knockout_log2_floor": -5.0,
        "pathways": PATHWAYS,
        "genes": genes,
        "edges": [
            {"source": src, "target": dst, "weight": round(float(wt * scale), 9)}
            for (src, dst), wt in sorted(edges.items())
        ],
    }
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
