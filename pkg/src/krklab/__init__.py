"""King-Rook-vs-King endgame laboratory.

Exact retrograde tablebase, dataset tooling, four from-scratch multiclass
classifiers, Azure-style evaluation metrics, an experiment harness and an
HTTP prediction service.
"""

__version__ = "0.1.0"

from .board import (  # noqa: F401
    IllegalPositionError,
    MoveSet,
    Piece,
    Position,
    Side,
    Square,
    Status,
    SymmetryTransform,
    canonicalize,
    is_adjacent,
    legal_black_moves,
    legal_white_moves,
    rook_attacks,
    status,
    validate_position,
)
from .dataset import (  # noqa: F401
    CLASS_LABELS,
    EncodingScheme,
    Record,
    SplitSpec,
    encode,
    load_dataset,
    parse_record,
    split,
    statistics,
)
from .metrics import ConfusionMatrix, MetricsReport, confusion, metrics  # noqa: F401
from .netscript import NetworkTopology, elaborate, parse, total_hidden_nodes  # noqa: F401
from .tablebase import (  # noqa: F401
    GameValue,
    Tablebase,
    classify,
    export_dataset,
    solve,
    verify_against_dataset,
)
