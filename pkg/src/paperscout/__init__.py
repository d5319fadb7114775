"""paperscout: two-stage retrieval of papers backing a science news article.

Stage one extracts scored keyphrases from the prepared article and
turns them into conjunctive BM25 queries over a paper corpus; stage
two re-ranks the pooled candidates by cosine similarity of document
representations.  Metrics and a benchmark runner live in
:mod:`paperscout.evaluation`.
"""

from .config import RunConfig, load_config
from .evaluation import (
    EvalReport,
    GoldPair,
    load_gold,
    mrr,
    ndcg_binary,
    precision_at_k,
    run_benchmark,
)
from .index import (
    CandidateSet,
    ConjunctiveQuery,
    InvertedIndex,
    PaperRecord,
    QueryCaps,
    bm25_score,
    build_index,
    generate_queries,
    load_corpus,
    load_index,
    query_remote_api,
    retrieve_candidates,
    save_index,
    search,
)
from .phrases import (
    ExtractionGold,
    Extractor,
    Phrase,
    PRF,
    TextRankParams,
    dedup_phrases,
    extract_np_chunks,
    extract_remote,
    extract_textrank,
    score_extraction,
    textrank_scores,
)
from .pipeline import PipelineResult, rank_candidates, run_pipeline
from .remote import RemoteServiceError, ServiceEndpoint
from .rerank import (
    RankedList,
    RetrievalCorpus,
    SparseVector,
    WordVectorTable,
    avg_wordvec,
    build_retrieval_corpus,
    cosine,
    remote_embed,
    rerank,
    tfidf_vector,
)
from .textprep import (
    CleanDocument,
    Pos,
    RawDocument,
    Token,
    clean_text,
    preprocess,
    segment_sentences,
    strip_markup,
    tokenize_and_tag,
)

__version__ = "0.1.0"
