"""Property generation pipeline: spec ingestion, retrieval, prompting,
providers, and the generate/filter/check/refine loop."""
from .extract import extract_blocks
from .prompts import Prompt, PromptDatabase, PromptError, build_prompt, prompt_hash
from .providers import (
    GenerationParams, HttpProvider, Provider, ProviderConfig, ProviderError, ProviderExhausted,
    ReplayProvider, ScriptedProvider, complete_with_retry,
)
from .retrieval import Chunk, build_corpus, load_corpus, retrieve_context
from .run import (
    PropertyRecord, RunConfig, RunReport, funnel_counts, generate_properties, run_pipeline,
    uncovered_categories,
    write_report,
)
from .specfile import SpecError, SpecFile, ingest_spec

__all__ = [
    "extract_blocks", "Prompt", "PromptDatabase", "PromptError", "build_prompt", "prompt_hash",
    "GenerationParams", "HttpProvider", "Provider", "ProviderConfig", "ProviderError",
    "ProviderExhausted", "ReplayProvider", "ScriptedProvider", "complete_with_retry",
    "Chunk", "build_corpus", "load_corpus", "retrieve_context", "PropertyRecord", "RunConfig",
    "RunReport", "funnel_counts", "generate_properties", "run_pipeline", "uncovered_categories", "write_report",
    "SpecError", "SpecFile", "ingest_spec",
]
