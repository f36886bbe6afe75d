"""morphofv: word-morphology descriptors, Fisher vector encoding and
attention fusion for fine-grained image classification and retrieval."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .fisher import (FisherVector, ProposalSelector, WordProposal, encode_fv,
                     image_textual_feature, normalize_fv, select_top_m)
from .fusion import (FusionConfig, FusionParams, LabeledDataset, TrainConfig, VisualInput,
                     backward, batch_loss, forward, forward_trace, init_params, loss,
                     textual_attend, train, visual_attend)
from .gmm import EmConfig, GmmModel, fit_gmm, log_density, posteriors
from .metrics import average_precision, cosine, map_classification, map_retrieval
from .pca import PcaModel, fit_pca, project
from .phoc import (PHOC_DIM, Alphabet, OccupancyRule, build_phoc, default_alphabet,
                   derive_bigrams, load_dictionary, normalize_word, region_occupancy)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "PHOC_DIM", "__version__",
    "Alphabet", "OccupancyRule", "normalize_word", "region_occupancy", "build_phoc",
    "derive_bigrams", "default_alphabet", "load_dictionary",
    "PcaModel", "fit_pca", "project",
    "EmConfig", "GmmModel", "fit_gmm", "log_density", "posteriors",
    "WordProposal", "ProposalSelector", "FisherVector", "select_top_m", "encode_fv",
    "normalize_fv", "image_textual_feature",
    "FusionConfig", "FusionParams", "TrainConfig", "LabeledDataset", "VisualInput",
    "init_params", "forward", "forward_trace", "visual_attend", "textual_attend",
    "loss", "batch_loss", "backward", "train",
    "cosine", "average_precision", "map_classification", "map_retrieval",
]
