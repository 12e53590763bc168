"""apibench: API-usage completion benchmarks, scoring, and misuse repair.

Pipeline stages communicate through JSONL artifacts:
ingest -> localize -> gen-tasks -> complete -> score -> report, with
sample-failures / mitigation-set / drfix covering the repair loop.
"""

from .annotate import ElementKind, MisuseCategory, MisuseLabel, MitigationSet
from .corpus import CorpusManifest, SourceFile, ingest
from .drfix import PipelineVariant, RepairTrace, Stage, run_pipeline
from .gateway import Gateway, GenMode, GenParams, GenRequest, GenResponse, ReplayStore
from .langs import Language
from .locator import ApiCallSite, ReceiverKind, SignatureKey, dedup_sample, locate
from .metrics import (
    AgreementReport,
    BleuReport,
    CbsReport,
    EmBatchReport,
    OneHotProvider,
    Smoothing,
    bleu,
    codebertscore,
    cohens_kappa,
    em_element,
    refusal_rate,
)
from .report import OverlapPartition, overlap_partition
from .taskgen import TaskInstance, TaskKind, extract_element, gen_method_infill, gen_param_completion

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "ApiCallSite",
    "BleuReport",
    "CbsReport",
    "CorpusManifest",
    "ElementKind",
    "EmBatchReport",
    "Gateway",
    "GenMode",
    "GenParams",
    "GenRequest",
    "GenResponse",
    "Language",
    "MisuseCategory",
    "MisuseLabel",
    "MitigationSet",
    "OneHotProvider",
    "OverlapPartition",
    "PipelineVariant",
    "ReceiverKind",
    "RepairTrace",
    "ReplayStore",
    "SignatureKey",
    "Smoothing",
    "SourceFile",
    "Stage",
    "TaskInstance",
    "TaskKind",
    "bleu",
    "codebertscore",
    "cohens_kappa",
    "dedup_sample",
    "em_element",
    "extract_element",
    "gen_method_infill",
    "gen_param_completion",
    "ingest",
    "locate",
    "overlap_partition",
    "refusal_rate",
    "run_pipeline",
]
