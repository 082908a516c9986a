"""Aligner-based heteronym labeling for sentence-level G2P training data."""

from .alignment import (compute_distance_matrix, frames_per_token, soft_alignment,
                        viterbi_align)
from .dataset import (LabeledSample, TrainingRecord, balance, emit_records, evaluate,
                      filter_threshold, parse_percent, stats)
from .io import (EncodingTable, load_encoding_table, parse_encoding_table, read_manifest,
                 read_matrix, write_matrix)
from .lexicon import (HeteronymInventory, PronLexicon, classify, load_heteronym_inventory,
                      load_pron_lexicon, mask_oov, parse_heteronym_inventory,
                      parse_pron_lexicon, prepare_sentence, tokenize)
from .scoring import (generate_candidates, score_candidates, select,
                      word_avg_distance)

__version__ = "0.1.0"
