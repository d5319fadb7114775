"""HTTP surface: POST /extract, POST /embed, GET /health."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .embedder import TextEmbedder
from .extractor import SpanExtractor
from .settings import Settings


class ExtractRequest(BaseModel):
    text: str


class Span(BaseModel):
    start: int
    end: int
    label: str
    score: float


class ExtractResponse(BaseModel):
    spans: list[Span]


class EmbedRequest(BaseModel):
    texts: list[str]
    model: str


class EmbedResponse(BaseModel):
    dim: int
    vectors: list[list[float]]


def create_app(settings: Settings) -> FastAPI:
    """Load every configured model and wire up the routes.

    A model that fails to load raises here, aborting startup - the
    service never comes up half-configured.
    """
    extractor = SpanExtractor(
        settings.extract_model,
        device=settings.device,
        window_tokens=settings.window_tokens,
        window_overlap=settings.window_overlap,
    )
    embedders: dict[str, TextEmbedder] = {
        name: TextEmbedder(path, device=settings.device)
        for name, path in settings.embed_models.items()
    }

    app = FastAPI(title="mlservice", version="0.1.0")

    @app.post("/extract", response_model=ExtractResponse)
    def extract(request: ExtractRequest) -> ExtractResponse:
        spans = extractor.predict(request.text)
        return ExtractResponse(spans=[Span(**span) for span in spans])

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest) -> EmbedResponse:
        embedder = embedders.get(request.model)
        if embedder is None:
            raise HTTPException(
                status_code=404,
                detail=f"unknown model {request.model!r}; "
                f"registered: {sorted(embedders)}",
            )
        return EmbedResponse(dim=embedder.dim, vectors=embedder.embed(request.texts))

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "extract_model": extractor.model_name,
            "embed_models": {name: e.dim for name, e in embedders.items()},
        }

    return app
