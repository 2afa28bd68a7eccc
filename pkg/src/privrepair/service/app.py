"""FastAPI application wrapping the core package.

Every endpoint is stateless and deterministic: the request carries the
field, the code, the stored symbols and the seed, so identical requests
produce identical responses.
"""

from __future__ import annotations

from fastapi import FastAPI

from privrepair import __version__
from privrepair.audit import audit_view, report_to_json_dict
from privrepair.bounds import BoundInput, bandwidth_report, sweep, sweep_csv
from privrepair.errors import ValidationError
from privrepair.field import field_from_config
from privrepair.protocols import SCHEME_RETRIEVAL, SchemeParams
from privrepair.rs import encode, encode_systematic, make_code, naive_retrieval_bandwidth
from privrepair.service import models
from privrepair.sim import Cluster, batch_audit, run_session

PUNCTURE_NOTE = ("helper budgets below n-1 are modeled by puncturing the code "
                 "to d+1 evaluation points")


def _build_code(code_model):
    ctx = field_from_config(code_model.field.model_dump())
    return make_code(ctx, k=code_model.k, alphas=code_model.alphas)


def _audit_model(report, view):
    data = report_to_json_dict(report, view)
    return models.AuditReportModel(**data)


def create_app():
    app = FastAPI(title="privrepair", version=__version__,
                  description="Private repair and retrieval of Reed-Solomon "
                              "coded symbols on simulated storage clusters.")

    @app.exception_handler(ValidationError)
    async def _validation_handler(request, exc):
        from fastapi.responses import JSONResponse
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/encode", response_model=models.EncodeResponse)
    def encode_endpoint(req: models.EncodeRequest):
        spec = _build_code(req.code)
        cw = encode_systematic(spec, req.message) if req.systematic \
            else encode(spec, req.message)
        return models.EncodeResponse(
            codeword=[models.SymbolModel(alpha=a, value=v)
                      for a, v in zip(spec.alphas, cw.values)],
            poly=list(cw.poly),
        )

    def _run_repair(req, scheme):
        spec = _build_code(req.code)
        given = {s.alpha: s.value for s in req.codeword}
        if set(given) != set(spec.alphas):
            raise ValidationError("codeword symbols do not match the code's "
                                  "evaluation points")
        cluster = Cluster(spec=spec, values=tuple(given[a] for a in spec.alphas))
        params = SchemeParams(spec, scheme, t=req.t, m=req.m)
        result = run_session(
            cluster, scheme, req.beta, req.seed,
            coalition=tuple(req.coalition), params=params,
            audit=req.audit, conditioned=req.conditioned,
            mask_coeffs=req.mask_coeffs,
        )
        tr = result.transcript
        return models.RepairResponse(
            scheme=scheme, beta=req.beta, seed=req.seed, t=params.t, m=params.m,
            recovered=tr.recovered,
            matches_expected=None if req.expected is None
            else tr.recovered == req.expected,
            bandwidth_down_subsymbols=tr.bandwidth_down_subsymbols,
            bandwidth_up_symbols=tr.bandwidth_up_symbols,
            naive_subsymbols=naive_retrieval_bandwidth(spec),
            nodes=[models.NodeExchange(alpha=a, query=list(q), response=list(r))
                   for a, q, r in tr.entries],
            audit=None if result.audit is None
            else _audit_model(result.audit, result.view),
        )

    @app.post("/repair", response_model=models.RepairResponse)
    def repair_endpoint(req: models.RepairRequest):
        if req.scheme is None:
            raise ValidationError("repair needs a scheme")
        if req.scheme == SCHEME_RETRIEVAL:
            raise ValidationError("use /retrieve for the retrieval scheme")
        return _run_repair(req, req.scheme)

    @app.post("/retrieve", response_model=models.RepairResponse)
    def retrieve_endpoint(req: models.RepairRequest):
        return _run_repair(req, SCHEME_RETRIEVAL)

    @app.post("/audit/view", response_model=models.AuditReportModel)
    def audit_view_endpoint(req: models.AuditViewRequest):
        from privrepair.audit import CoalitionView

        spec = _build_code(req.code)
        params = SchemeParams(spec, req.scheme, t=req.t, m=req.m)
        entries = []
        for e in sorted(req.view, key=lambda e: e.alpha):
            payload = e.query[0] if req.scheme in ("secret-sharing", "retrieval") \
                else tuple(e.query)
            entries.append((e.alpha, payload))
        view = CoalitionView(scheme=req.scheme, params=params, entries=tuple(entries))
        return _audit_model(audit_view(view, conditioned=req.conditioned), view)

    @app.post("/audit/batch", response_model=models.BatchAuditResponse)
    def audit_batch_endpoint(req: models.BatchAuditRequest):
        spec = _build_code(req.code)
        params = SchemeParams(spec, req.scheme, t=req.t, m=req.m)
        summary = batch_audit(params, req.scheme, req.coalition_size,
                              state_limit=req.state_limit,
                              sample_states=req.sample_states, seed=req.seed)
        witness = None
        if summary.witness is not None:
            beta, coalition, view, report = summary.witness
            witness = models.BatchAuditWitness(
                beta=beta, coalition=list(coalition),
                view=[models.ViewEntry(alpha=a,
                                       query=list(q) if isinstance(q, tuple) else [q])
                      for a, q in view.entries],
                candidates=report.ideal.to_json_dict(),
            )
        ratio = summary.worst_ratio
        return models.BatchAuditResponse(
            scheme=req.scheme, passed=summary.passed,
            views_checked=summary.views_checked,
            worst_ratio=-1.0 if ratio == float("inf") else ratio,
            witness=witness,
        )

    @app.post("/bounds", response_model=models.BoundsResponse)
    def bounds_endpoint(req: models.BoundsRequest):
        inp = BoundInput(n=req.n, k=req.k, t=req.t, q=req.q, ell=req.ell, d=req.d)
        rep = bandwidth_report(inp)
        return models.BoundsResponse(
            scheme_bandwidth=rep.scheme_bandwidth,
            best_m=rep.best_m,
            naive=rep.naive,
            fractional=models.FractionalModel(
                value=rep.fractional.value,
                ratio_num=rep.fractional.ratio.numerator,
                ratio_den=rep.fractional.ratio.denominator,
                base=rep.fractional.base,
            ),
            integer=rep.integer,
            attained=rep.attained,
        )

    @app.post("/sweep", response_model=models.SweepResponse)
    def sweep_endpoint(req: models.SweepRequest):
        rows = sweep(req.k, req.t, req.q, req.ell, req.d_lo, req.d_hi)
        return models.SweepResponse(
            rows=[models.SweepRowModel(**r.__dict__) for r in rows],
            csv=sweep_csv(rows),
            semantics=PUNCTURE_NOTE,
        )

    return app
