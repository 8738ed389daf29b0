from ._core import (
    __version__,
    coarsen_label,
    evaluate,
    macro_f1,
    mae_macro,
    micro_f1,
    surface_counts,
    tokenize,
)

__all__ = [
    "__version__",
    "coarsen_label",
    "evaluate",
    "macro_f1",
    "mae_macro",
    "micro_f1",
    "surface_counts",
    "tokenize",
]
