"""rminer: mine decision rationale sentences from proposal discussion archives.

Pipeline: parse mailing-list mbox archives and proposal documents, link
messages to proposals, score every sentence with thirteen additive
heuristics, rank candidates per proposal by sentence or by message, and
evaluate the rankings against a ground-truth file. A deterministic
synthetic-corpus generator makes the whole pipeline testable without real
archives.
"""
from .config import AppConfig, ConfigError, load_app_config, make_scorer
from .corpus_io import load_corpus, save_corpus, save_diagnostics
from .evaluation import (
    GroundTruthEntry,
    GroundTruthError,
    ablation,
    average_ndcg,
    classify_influence,
    evaluate_ndcg,
    load_ground_truth,
    match_rank,
    ndcg_at_k,
    parameter_sweep,
    rank_match_table,
    verify_evaluation,
)
from .heuristics import (
    HEURISTIC_IDS,
    HeuristicScorer,
    HeuristicVector,
    ScoredSentence,
    SentenceContext,
    final_score,
    revector,
    score_corpus,
)
from .lexicon import Lexicon, LexiconError, load_lexicon
from .linker import link_messages
from .mbox import parse_mbox, parse_mbox_file
from .model import (
    EmailMessage,
    LinkedCorpus,
    Paragraph,
    PepRecord,
    Sentence,
    StateTransition,
    StateVocabulary,
)
from .pep_docs import (
    attach_history,
    extract_state_history,
    parse_pep_document,
    read_commit_log,
)
from .pipeline import ingest
from .ranking import RankedEntry, RankedList, RationaleRanker, rank_corpus
from .report import render_report
from .synth import SynthSpec, generate
from .validation import InputValidationError, check_corpus

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "ConfigError",
    "EmailMessage",
    "GroundTruthEntry",
    "GroundTruthError",
    "HEURISTIC_IDS",
    "HeuristicScorer",
    "HeuristicVector",
    "InputValidationError",
    "Lexicon",
    "LexiconError",
    "LinkedCorpus",
    "Paragraph",
    "PepRecord",
    "RankedEntry",
    "RankedList",
    "RationaleRanker",
    "ScoredSentence",
    "Sentence",
    "SentenceContext",
    "StateTransition",
    "StateVocabulary",
    "SynthSpec",
    "ablation",
    "attach_history",
    "average_ndcg",
    "check_corpus",
    "classify_influence",
    "evaluate_ndcg",
    "extract_state_history",
    "final_score",
    "generate",
    "ingest",
    "link_messages",
    "load_app_config",
    "load_corpus",
    "load_ground_truth",
    "load_lexicon",
    "make_scorer",
    "match_rank",
    "ndcg_at_k",
    "parameter_sweep",
    "parse_mbox",
    "parse_mbox_file",
    "parse_pep_document",
    "rank_corpus",
    "rank_match_table",
    "read_commit_log",
    "render_report",
    "revector",
    "save_corpus",
    "save_diagnostics",
    "score_corpus",
    "verify_evaluation",
]
