from ._core import (
    entailment_metrics,
    generate_synthetic,
    majority_label,
    normalize,
    parse_cjk_number,
    parse_terminal_marker,
    render_prompt,
    retrieve_d0,
    segment_judgment,
    sha256_hex,
    split_sentences,
    strip_whitespace,
    verify_reason,
)

__all__ = [
    "entailment_metrics",
    "generate_synthetic",
    "majority_label",
    "normalize",
    "parse_cjk_number",
    "parse_terminal_marker",
    "render_prompt",
    "retrieve_d0",
    "segment_judgment",
    "sha256_hex",
    "split_sentences",
    "strip_whitespace",
    "verify_reason",
]
