"""scorelens: interpretability workbench for summary-scoring transformers."""

from .attention import (
    AttentionTensor,
    CellState,
    classify_cell,
    ingest_attention,
    slice_attention,
    storage_cells,
)
from .assignments import AnalysisOptions, Assignment, SummarySlot, new_assignment
from .perturbation import (
    PerturbationReport,
    Variant,
    generate_variants,
    run_perturbation,
    word_underline_value,
)
from .provenance import (
    EventLog,
    RunRecord,
    TrainingExample,
    TrainingStore,
    derive_component_scores,
    load_example,
    scatter_payload,
)
from .scoring import (
    MaskSpec,
    ModelConfig,
    ModelInput,
    ModelRegistry,
    ScoreResult,
    build_attention_mask,
    build_model_input,
    external_score,
    reference_forward,
)
from .segmentation import (
    SpanKind,
    TextSpan,
    split_sentences,
    split_words,
    subword_tokenize,
)
from .spelling import FrequencyDictionary

__version__ = "0.1.0"
