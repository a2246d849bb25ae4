"""Emotion polarity pipeline for Latin.

Weakly-supervised annotation (lexicon heuristics and LLM prompting),
staged adapter training on a miniature transformer encoder, and the
matching evaluation and ablation tooling.
"""

from .corpus import (AnnotatedExample, Label, LABEL_ORDER, Provenance, Sentence,
                     Token, load_labeled_tsv, load_treebank_dir, parse_conllu,
                     read_dataset, write_dataset)
from .errors import ConfigError, DataError, ParseError
from .evaluation import (ConfusionMatrix, DisagreementReport, EvalReport,
                         confusion_matrix, disagreement_report, evaluate,
                         macro_f1, micro_f1, per_class_prf, render_report)
from .heuristic import (HeuristicConfig, LabelStats, annotate_corpus,
                        label_sentence, mean_polarity, passes_filter)
from .lexicon import LexiconMatch, PolarityLexicon, load_lexicon, match_sentence
from .llm import (Budget, ClientConfig, HttpBackend, LlmVerdict, PromptPayload,
                  ReplayBackend, annotate_batch, build_prompt, estimate_cost,
                  few_shots_from_gold, parse_response)
from .model import (AdapterParams, ModelConfig, ParamStore, Vocab,
                    adapter_forward, build_vocab, ce_loss, classify,
                    decode_dual, encode, init_params, mlm_loss)
from .train import (AblationTable, Checkpoint, StageConfig, load_checkpoint,
                    run_ablation, run_pipeline, save_checkpoint, train_stage,
                    trainable_mask)

__version__ = "0.1.0"
