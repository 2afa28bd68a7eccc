"""Pydantic request/response models for the HTTP service.

Field elements travel as integer indices; subfield elements are indices
too (bits when q = 2).  These models are the wire contract that the CLI
client consumes.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Scheme = Literal["plain", "hidden-subspace", "secret-sharing", "retrieval"]


class FieldModel(BaseModel):
    p: int
    q: int
    ell: int
    modulus: list[int]


class CodeModel(BaseModel):
    field: FieldModel
    alphas: Optional[list[int]] = None  # default: every field element, in index order
    k: int


class SymbolModel(BaseModel):
    alpha: int
    value: int


class EncodeRequest(BaseModel):
    code: CodeModel
    message: list[int]
    systematic: bool = False


class EncodeResponse(BaseModel):
    codeword: list[SymbolModel]
    poly: list[int]


class NodeExchange(BaseModel):
    alpha: int
    query: list[int]
    response: list[int]


class ViewEntry(BaseModel):
    alpha: int
    query: list[int]


class AuditReportModel(BaseModel):
    scheme: Scheme
    coalition: list[int]
    view: list[ViewEntry]
    candidates: dict[str, int]
    uniform: bool
    conditioned: Optional[dict[str, int]] = None
    conditioned_uniform: Optional[bool] = None


class RepairRequest(BaseModel):
    code: CodeModel
    codeword: list[SymbolModel]
    scheme: Optional[Scheme] = None  # required for /repair, implied by /retrieve
    beta: int
    t: Optional[int] = None
    m: Optional[int] = None
    seed: int = 0
    coalition: list[int] = Field(default_factory=list)
    audit: bool = False
    conditioned: bool = False
    mask_coeffs: Optional[list[int]] = None  # replay hook; normally rng-drawn
    expected: Optional[int] = None


class RepairResponse(BaseModel):
    scheme: Scheme
    beta: int
    seed: int
    t: int
    m: int
    recovered: int
    matches_expected: Optional[bool] = None
    bandwidth_down_subsymbols: int
    bandwidth_up_symbols: int
    naive_subsymbols: int
    nodes: list[NodeExchange]
    audit: Optional[AuditReportModel] = None


class AuditViewRequest(BaseModel):
    code: CodeModel
    scheme: Scheme
    t: Optional[int] = None
    m: Optional[int] = None
    view: list[ViewEntry]
    conditioned: bool = False


class BatchAuditRequest(BaseModel):
    code: CodeModel
    scheme: Scheme
    t: Optional[int] = None
    m: Optional[int] = None
    coalition_size: int = 1
    state_limit: int = 200_000
    sample_states: int = 64
    seed: int = 0


class BatchAuditWitness(BaseModel):
    beta: int
    coalition: list[int]
    view: list[ViewEntry]
    candidates: dict[str, int]


class BatchAuditResponse(BaseModel):
    scheme: Scheme
    passed: bool
    views_checked: int
    worst_ratio: float
    witness: Optional[BatchAuditWitness] = None


class BoundsRequest(BaseModel):
    n: int
    k: int
    t: int
    q: int
    ell: int
    d: Optional[int] = None


class FractionalModel(BaseModel):
    value: float
    ratio_num: int
    ratio_den: int
    base: int


class BoundsResponse(BaseModel):
    scheme_bandwidth: Optional[int]
    best_m: Optional[int]
    naive: int
    fractional: FractionalModel
    integer: int
    attained: bool


class SweepRequest(BaseModel):
    k: int
    t: int
    q: int
    ell: int
    d_lo: int
    d_hi: int


class SweepRowModel(BaseModel):
    d: int
    bw_private: int
    bw_plain: int
    bound_private: int
    bound_plain: int
    m_private: int
    m_plain: int
    attained: bool


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    csv: str
    semantics: str
