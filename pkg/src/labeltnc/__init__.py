"""Label-Trustworthiness and Label-Continuity for labeled DR embeddings."""

from labeltnc.core import (
    CvmConfig,
    EvalPair,
    LabeledDataset,
    LtncError,
    remap_labels,
    validate_pair,
)
from labeltnc.cvm import ch_btwn, check_axioms, dsc, silhouette_cvm
from labeltnc.ltnc import clm_matrix, interpret, label_tnc
from labeltnc.metricspace import DistanceOracle

__version__ = "0.1.0"

__all__ = [
    "CvmConfig",
    "DistanceOracle",
    "EvalPair",
    "LabeledDataset",
    "LtncError",
    "ch_btwn",
    "check_axioms",
    "clm_matrix",
    "dsc",
    "interpret",
    "label_tnc",
    "remap_labels",
    "silhouette_cvm",
    "validate_pair",
]
