"""Exact tensor rank: Nullstellensatz certificates, exact linear algebra and GF(q) search."""

from .exact_arith import QQ, QQI, GaloisField
from .ff_search import SearchBudget, rank_over_Fq, search_decomposition, srank_over_Fq
from .nss_certifier import (
    Certificate,
    Status,
    Verdict,
    certify_rank_gt,
    certify_srank_gt,
    complexity_estimate,
    find_certificate,
    verify_certificate,
)
from .tensor_core import Decomposition, DenseTensor, SymTensor, eval_decomposition

__all__ = [
    "QQ", "QQI", "GaloisField", "SearchBudget", "rank_over_Fq", "search_decomposition",
    "srank_over_Fq", "Certificate", "Status", "Verdict", "certify_rank_gt", "certify_srank_gt",
    "complexity_estimate", "find_certificate", "verify_certificate", "Decomposition",
    "DenseTensor", "SymTensor", "eval_decomposition",
]
