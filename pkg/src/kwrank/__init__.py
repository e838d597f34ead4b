"""Image annotation by keyword frequency, with same-frequency ties broken by a
word-correlation rank over an association-rule knowledge base."""

from .annotation_index import (AnnotatedImage, Annotation, InvertedIndex, annotate_images, index_add,
                               load_index, query, save_index)
from .errors import (ConfigError, CyclicKnowledgeBase, EmptyInput, EmptyTable, FetchError, FormatError,
                     InvalidEncoding, KBError, KwrankError, NotFound, UnknownKeyword, VocabularyError)
from .frequency import (CandidateSet, FrequencyTable, TieGroup, count_frequencies, detect_ties,
                        select_candidates)
from .importance_rank import (ImportanceReport, RankScore, format_report, oracle_path_count, rank,
                              rank_all, resolve_tie, transition_weight)
from .knowledge_base import (CycleReport, KnowledgeBase, Rule, backward_words, load_kb, mine_rules,
                             save_kb, validate_acyclic)
from .pipeline import PipelineConfig, RunSummary, load_config, parse_config, run_pipeline
from .text_ingest import (Document, ImageRef, Token, TokenSource, load_source, load_sources,
                          parse_document, tokenize)

__version__ = "0.1.0"
