"""HTTP service over the library.

Every operation the CLI offers is exposed as a POST endpoint taking a
pydantic-validated request.  The service is stateless: each request
names its term, dialect and agent definitions, and systems are rebuilt
per request (construction is cheap and memoisation lives inside the
System object).

Lassos travel as JSON objects {"stem": [...], "cycle": [...]} whose
steps are derivation name-trees; abstract lassos use [source, label,
target] triples and set "abstract": true.
"""

from __future__ import annotations

from typing import Any, Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import corpus as corpus_mod
from .concurrency import ConcVariant, conc
from .criteria import (
    BUILTIN_FAMILIES, Exhausted, TaskFamily, coinductive_is_just,
    extend_to_just, is_fair,
)
from .paths import (
    AbstractLasso, Lasso, abstract_is_just, is_just, is_progressing,
    is_sigjust, make_abstract_lasso, make_lasso, minimal_blocking_set,
)
from .semantics import (
    BoundExceeded, System, deriv_from_tree, deriv_name, deriv_to_tree,
    in_tr_sbullet, ltsc_to_dot, ltsc_to_json,
)
from .terms import Calculus, parse_label, parse_process, print_process

app = FastAPI(
    title="justness",
    description="Labelled transition systems with concurrency for the "
                "CCS family, and liveness completeness criteria on "
                "lasso-shaped paths.",
)

DIALECTS = Literal["ccs", "abc", "abcd", "ccss", "ccss-enc"]
VARIANTS = Literal["dyn", "dyn-direct", "static", "c",
                   "static-prime", "c-prime", "gh"]


class TermRequest(BaseModel):
    term: str
    dialect: DIALECTS = "ccs"
    defs: str = ""


class ParseResponse(BaseModel):
    printed: str
    dialect: str
    signals: list[str]
    broadcast_names: list[str]


class LtsRequest(TermRequest):
    bound: int = Field(default=1000, ge=1)
    dot: bool = False


class LtsResponse(BaseModel):
    ltsc: dict
    dot: str | None = None


class ConcRequest(TermRequest):
    bound: int = Field(default=1000, ge=1)
    variant: VARIANTS = "dyn"


class ConcResponse(BaseModel):
    derivations: list[str]
    synchrons: list[list[dict]]
    matrix: list[list[bool | None]]
    csv: str


class LassoSpec(BaseModel):
    stem: list[Any] = []
    cycle: list[Any] = []
    abstract: bool = False


class JustRequest(TermRequest):
    lasso: LassoSpec
    blocking: list[str] = []
    variant: VARIANTS = "static"
    coinductive: bool = False


class VerdictResponse(BaseModel):
    holds: bool
    witness: dict
    blocking_used: list[str]


class MinbRequest(TermRequest):
    lasso: LassoSpec
    variant: VARIANTS = "dyn"


class MinbResponse(BaseModel):
    blocking: list[str]


class FairRequest(TermRequest):
    lasso: LassoSpec
    blocking: list[str] = []
    mode: Literal["strong", "weak", "j"] = "weak"
    family: str = "conc"
    tasks: dict[str, list[int]] | None = None
    bound: int = Field(default=1000, ge=1)


class ExtendRequest(TermRequest):
    prefix: LassoSpec = LassoSpec()
    blocking: list[str] = []
    variant: VARIANTS = "dyn"
    budget: int = Field(default=10000, ge=1)


class ExtendResponse(BaseModel):
    lasso: dict
    pretty: str
    verdict: VerdictResponse


class CheckRequest(BaseModel):
    suites: list[str] = []
    seed: int = 7
    size: int | None = None


class CheckResponse(BaseModel):
    passed: bool
    results: list[dict]


def _build(req: TermRequest):
    try:
        system, p = System.from_text(req.term, Calculus.from_name(req.dialect),
                                     req.defs)
    except Exception as e:  # parse, dialect, guardedness errors
        raise HTTPException(status_code=400, detail=str(e)) from e
    return system, p


def _labels(system: System, names: list[str]) -> frozenset:
    try:
        return frozenset(parse_label(s, system.signals) for s in names if s)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


def _lasso(system: System, p, spec: LassoSpec):
    try:
        if spec.abstract:
            def triple(t):
                src = parse_process(t[0], system.calc, system.env,
                                    system.signals)
                tgt = parse_process(t[2], system.calc, system.env,
                                    system.signals)
                return (src, parse_label(t[1], system.signals), tgt)

            return make_abstract_lasso(p, [triple(t) for t in spec.stem],
                                       [triple(t) for t in spec.cycle])
        stem = [deriv_from_tree(t, system) for t in spec.stem]
        cycle = [deriv_from_tree(t, system) for t in spec.cycle]
        for i, d in enumerate(stem + cycle):
            if d not in system.derivations(d.source):
                raise ValueError(
                    f"step {i} is not derivable under {system.calc.value}: "
                    f"{deriv_name(d)}")
        return make_lasso(p, stem, cycle)
    except Exception as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


def lasso_to_json(lasso: Lasso) -> dict:
    return {"first": print_process(lasso.first),
            "stem": [deriv_to_tree(d) for d in lasso.stem],
            "cycle": [deriv_to_tree(d) for d in lasso.cycle],
            "labels": [str(d.label) for d in lasso.stem + lasso.cycle]}


@app.post("/parse", response_model=ParseResponse)
def parse_endpoint(req: TermRequest) -> ParseResponse:
    system, p = _build(req)
    printed = print_process(p)
    again = parse_process(printed, system.calc, system.env)
    if again is not p:
        raise HTTPException(status_code=500, detail="printer does not round-trip")
    return ParseResponse(printed=printed, dialect=req.dialect,
                         signals=sorted(system.signals),
                         broadcast_names=sorted(system.broadcast_universe))


@app.post("/lts", response_model=LtsResponse)
def lts_endpoint(req: LtsRequest) -> LtsResponse:
    system, p = _build(req)
    try:
        lts = system.reachable_lts(p, req.bound)
    except BoundExceeded as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return LtsResponse(ltsc=ltsc_to_json(lts),
                       dot=ltsc_to_dot(lts) if req.dot else None)


@app.post("/conc", response_model=ConcResponse)
def conc_endpoint(req: ConcRequest) -> ConcResponse:
    system, p = _build(req)
    try:
        lts = system.reachable_lts(p, req.bound)
    except BoundExceeded as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    variant = ConcVariant.from_name(req.variant)
    names = [deriv_name(d) for d in lts.derivations]
    from .synchrons import deriv_synchrons, synchron_to_json
    synchrons = [[synchron_to_json(x) for x in sorted(deriv_synchrons(d),
                                                      key=str)]
                 for d in lts.derivations]
    matrix: list[list[bool | None]] = []
    same_source_only = variant is ConcVariant.GH
    for t in lts.derivations:
        row: list[bool | None] = []
        for u in lts.derivations:
            if same_source_only and t.source is not u.source:
                row.append(None)
                continue
            try:
                row.append(conc(t, u, variant))
            except Exception:
                row.append(None)  # pair outside the relation's type
        matrix.append(row)
    lines = ["t\\u," + ",".join(f'"{n}"' for n in names)]
    for n, row in zip(names, matrix):
        cells = ["" if v is None else ("1" if v else "0") for v in row]
        lines.append(f'"{n}",' + ",".join(cells))
    return ConcResponse(derivations=names, synchrons=synchrons,
                        matrix=matrix, csv="\n".join(lines) + "\n")


def _verdict_response(verdict, blocking) -> VerdictResponse:
    return VerdictResponse(holds=verdict.holds, witness=verdict.witness,
                           blocking_used=sorted(str(l) for l in blocking))


@app.post("/just", response_model=VerdictResponse)
def just_endpoint(req: JustRequest) -> VerdictResponse:
    system, p = _build(req)
    blocking = _labels(system, req.blocking)
    lasso = _lasso(system, p, req.lasso)
    variant = ConcVariant.from_name(req.variant)
    try:
        if isinstance(lasso, AbstractLasso):
            verdict = abstract_is_just(lasso, system, blocking, variant)
        elif req.coinductive:
            verdict = coinductive_is_just(lasso, system, blocking)
        else:
            verdict = is_just(lasso, system, blocking, variant)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    blocking = blocking | system.receptive_labels()
    return _verdict_response(verdict, blocking)


@app.post("/sigjust", response_model=VerdictResponse)
def sigjust_endpoint(req: JustRequest) -> VerdictResponse:
    system, p = _build(req)
    blocking = _labels(system, req.blocking)
    lasso = _lasso(system, p, req.lasso)
    if isinstance(lasso, AbstractLasso):
        raise HTTPException(status_code=400,
                            detail="sigjust expects a concrete lasso")
    variant = ConcVariant.from_name(req.variant)
    try:
        if req.coinductive:
            verdict = coinductive_is_just(lasso, system, blocking, sig=True)
        else:
            verdict = is_sigjust(lasso, system, blocking, variant)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    blocking = blocking | system.receptive_labels()
    return _verdict_response(verdict, blocking)


@app.post("/minb", response_model=MinbResponse)
def minb_endpoint(req: MinbRequest) -> MinbResponse:
    system, p = _build(req)
    lasso = _lasso(system, p, req.lasso)
    if isinstance(lasso, AbstractLasso):
        raise HTTPException(status_code=400,
                            detail="minb expects a concrete lasso")
    out = minimal_blocking_set(lasso, system,
                               ConcVariant.from_name(req.variant))
    return MinbResponse(blocking=sorted(str(l) for l in out))


@app.post("/fair", response_model=VerdictResponse)
def fair_endpoint(req: FairRequest) -> VerdictResponse:
    system, p = _build(req)
    blocking = _labels(system, req.blocking)
    lasso = _lasso(system, p, req.lasso)
    if isinstance(lasso, AbstractLasso):
        raise HTTPException(status_code=400,
                            detail="fair expects a concrete lasso")
    try:
        lts = system.reachable_lts(p, req.bound)
    except BoundExceeded as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    if req.tasks is not None:
        try:
            fam = TaskFamily(tuple(
                (name, frozenset(lts.derivations[i] for i in idxs))
                for name, idxs in req.tasks.items()))
        except IndexError as e:
            raise HTTPException(status_code=400,
                                detail="task index out of range") from e
    else:
        maker = BUILTIN_FAMILIES.get(req.family)
        if maker is None:
            raise HTTPException(
                status_code=400,
                detail=f"unknown family {req.family!r}; builtins: "
                       + ", ".join(BUILTIN_FAMILIES))
        fam = maker(lts)
    try:
        verdict = is_fair(lasso, system, blocking, fam, req.mode)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return _verdict_response(verdict, blocking | system.receptive_labels())


@app.post("/extend", response_model=ExtendResponse)
def extend_endpoint(req: ExtendRequest) -> ExtendResponse:
    system, p = _build(req)
    blocking = _labels(system, req.blocking)
    prefix = _lasso(system, p, req.prefix)
    if isinstance(prefix, AbstractLasso) or not prefix.is_finite:
        raise HTTPException(status_code=400,
                            detail="the prefix must be a finite concrete path")
    variant = ConcVariant.from_name(req.variant)
    try:
        out = extend_to_just(system, prefix, blocking, variant, req.budget)
    except Exhausted as e:
        raise HTTPException(status_code=409, detail={
            "error": str(e), "partial": lasso_to_json(e.partial)}) from e
    verdict = is_just(out, system, blocking, variant)
    return ExtendResponse(lasso=lasso_to_json(out), pretty=str(out),
                          verdict=_verdict_response(
                              verdict, blocking | system.receptive_labels()))


@app.post("/progress", response_model=VerdictResponse)
def progress_endpoint(req: JustRequest) -> VerdictResponse:
    system, p = _build(req)
    blocking = _labels(system, req.blocking)
    lasso = _lasso(system, p, req.lasso)
    if isinstance(lasso, AbstractLasso):
        raise HTTPException(status_code=400,
                            detail="progress expects a concrete lasso")
    verdict = is_progressing(lasso, system, blocking)
    return _verdict_response(verdict, blocking | system.receptive_labels())


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest) -> CheckResponse:
    try:
        results = corpus_mod.run_suites(req.suites or None, seed=req.seed,
                                        size=req.size)
    except KeyError as e:
        raise HTTPException(status_code=400, detail=str(e.args[0])) from e
    return CheckResponse(passed=all(r.passed for r in results),
                         results=[r.to_json() for r in results])
