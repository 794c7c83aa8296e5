# Copyright 2026 The qweval Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Quality-weighted BLEU, METEOR, ROUGE-L and CIDEr for comment generation.

References are passed as ``(tokens, quality)`` pairs with quality in [0, 1].
"""

from qweval._qweval import (
    Article,
    CommentRecord,
    CorpusFormatError,
    CorpusStats,
    CorrelationResult,
    DocumentFrequencyTable,
    MeteorAlignment,
    MetricConfig,
    MetricScore,
    ScoredArticle,
    TfIdfIndex,
    UndefinedCorrelation,
    average_ranks,
    build_df_table,
    build_index,
    cohen_weighted_kappa,
    corpus_score,
    corpus_stats,
    jitter,
    load_corpus,
    meteor_align,
    normalize_quality,
    normalize_to_human,
    parse_article,
    pearson,
    permutation_p_value,
    retrieve_articles,
    retrieve_comment,
    spearman,
    split_tokens,
    weighted_bleu,
    weighted_cider,
    weighted_meteor,
    weighted_rouge_l,
)

__version__ = "0.1.0"


def unit_quality(references):
    """Pairs every token sequence with quality 1 (the unweighted metrics)."""
    return [(list(tokens), 1.0) for tokens in references]
