"""Python surface of the fcnet C++ core.

Signals are numpy arrays of shape (T, R): rows are timepoints, columns are
channels. Adjacency, attention, and correlation matrices are (R, R).
"""

from ._fcnet import (
    FcnetError,
    atlas_labels,
    attention_rows,
    fcn_adjacency,
    fisher_z,
    kld,
    lsirm_fit,
    mapper_adjacency,
    pca_embed,
    pearson,
    rank_rois,
    run_id,
    train_cv,
    tsne_embed,
    umap_embed,
)

__all__ = [
    "FcnetError",
    "atlas_labels",
    "attention_rows",
    "fcn_adjacency",
    "fisher_z",
    "kld",
    "lsirm_fit",
    "mapper_adjacency",
    "pca_embed",
    "pearson",
    "rank_rois",
    "run_id",
    "train_cv",
    "tsne_embed",
    "umap_embed",
]
