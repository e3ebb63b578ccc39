"""HTTP session service.

JSON API over a SessionEngine:

    POST   /sessions            -> {"session_id": ...}
    POST   /sessions/{id}/ask   -> resolved query, category, terms, results
    GET    /sessions/{id}       -> full transcript
    DELETE /sessions/{id}
    GET    /healthz
    GET    /config              -> the engine's fixed parameters (for UIs)

Errors are {"error": message} with 400 for bad input and 404 for an
unknown session, including pydantic validation failures (FastAPI's
default 422/detail shape is overridden for a single uniform contract).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import ConvSearchError, UnknownSessionError
from .pipeline import AskResponse, SessionEngine, SessionState


class AskRequest(BaseModel):
    utterance: str
    k: int | None = None
    # Per-ask override so a client can toggle cue reranking (0 disables).
    rerank_lambda: float | None = None


class ResultCard(BaseModel):
    doc_id: str
    score: float
    snippet: str


class AskResponseBody(BaseModel):
    resolved_query: str
    category: str
    weighted_terms: list[tuple[str, float]]
    results: list[ResultCard]


class TurnBody(BaseModel):
    raw_utterance: str
    resolved_query: str
    category: str
    results: list[ResultCard]


class SessionBody(BaseModel):
    session_id: str
    created_at: float
    topic_phrase: str
    turns: list[TurnBody]


def _ask_body(response: AskResponse) -> AskResponseBody:
    return AskResponseBody(
        resolved_query=response.resolved_query,
        category=response.category.value,
        weighted_terms=response.weighted_terms,
        results=[
            ResultCard(doc_id=r.doc_id, score=r.score, snippet=r.snippet)
            for r in response.results
        ],
    )


def _session_body(state: SessionState) -> SessionBody:
    return SessionBody(
        session_id=state.session_id,
        created_at=state.created_at,
        topic_phrase=state.topic_phrase,
        turns=[
            TurnBody(
                raw_utterance=t.raw_utterance,
                resolved_query=t.resolved_utterance,
                category=t.category.value,
                results=[
                    ResultCard(doc_id=r.doc_id, score=r.score, snippet=r.snippet)
                    for r in t.results
                ],
            )
            for t in state.turns
        ],
    )


def create_app(engine: SessionEngine) -> FastAPI:
    app = FastAPI(title="convsearch", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(UnknownSessionError)
    async def _unknown_session(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ConvSearchError)
    async def _bad_input(request: Request, exc: ConvSearchError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _invalid(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        msg = first.get("msg", "invalid request")
        return JSONResponse(
            status_code=400,
            content={"error": f"{where}: {msg}" if where else msg},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/config")
    def config():
        return {
            "weights": {
                "w_current": engine.weights.w_current,
                "w_first": engine.weights.w_first,
                "w_previous": engine.weights.w_previous,
            },
            "mu": engine.retrieval.mu,
            "scorer": engine.retrieval.scorer,
            "rerank_lambda": engine.rerank_params.lambda_,
            "default_k": 10,
            "doc_count": engine.index.doc_count,
        }

    @app.post("/sessions")
    def create_session():
        return {"session_id": engine.create_session()}

    @app.post("/sessions/{session_id}/ask", response_model=AskResponseBody)
    def ask(session_id: str, body: AskRequest):
        response = engine.ask(
            session_id,
            body.utterance,
            k=body.k if body.k is not None else 10,
            rerank_lambda=body.rerank_lambda,
        )
        return _ask_body(response)

    @app.get("/sessions/{session_id}", response_model=SessionBody)
    def get_session(session_id: str):
        return _session_body(engine.get_history(session_id))

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        engine.delete_session(session_id)
        return {"deleted": True}

    return app
