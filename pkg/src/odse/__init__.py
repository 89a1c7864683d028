"""Labeled-graph classification in an entropy-compressed dissimilarity space."""

from .classify import EmbeddedTrainingSet, evaluate, knn_classify, knn_classify_many
from .datasets import Dataset, load_dataset, parse_gxl, read_native, write_dataset, write_native
from .dissimilarity import DissimilarityMatrix, TwecCache, build_dm, filter_columns
from .entropy import (
    MstReConfig,
    QreConfig,
    alpha_of_gamma,
    beta_approx,
    mst_length,
    mst_renyi_normalized,
    qre_joint,
    qre_scalar,
    sigma_upper_bound,
)
from .graph import Composite, LabelDissimConfig, LabeledGraph, RealVector, Symbol, label_dissimilarity
from .optimizer import GaConfig, OdseModel, decode_genome, fitness, ga_optimize
from .prototypes import (
    PrototypeSet,
    bsas,
    compress,
    efficiency_experiment,
    expand,
    minsod,
    mode_seek,
    random_init,
    theta_mst,
    theta_qre,
)
from .synthetic import letter_like_dataset
from .twec import TwecWeights, twec

__version__ = "0.1.0"
