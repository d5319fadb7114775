"""Session fixtures: tiny checkpoints, an app, a TestClient, a live server."""

from __future__ import annotations

import threading
import time

import pytest
import uvicorn
from fastapi.testclient import TestClient

from mlservice.app import create_app
from mlservice.checkpoints import make_encoder, make_token_classifier
from mlservice.settings import Settings

from sample_texts import FIXTURE_TEXTS  # noqa: F401  (re-exported for tests)


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory):
    root = tmp_path_factory.mktemp("checkpoints")
    return {
        "extract": make_token_classifier(root / "extract", seed=0),
        "embed_mini": make_encoder(root / "embed_mini", seed=1, hidden_size=32),
        "embed_wide": make_encoder(root / "embed_wide", seed=2, hidden_size=48),
    }


@pytest.fixture(scope="session")
def settings(checkpoints) -> Settings:
    return Settings(
        extract_model=str(checkpoints["extract"]),
        embed_models={
            "mini": str(checkpoints["embed_mini"]),
            "wide": str(checkpoints["embed_wide"]),
        },
        window_tokens=128,  # small windows so the long fixture text stripes
        window_overlap=16,
    )


@pytest.fixture(scope="session")
def app(settings):
    return create_app(settings)


@pytest.fixture(scope="session")
def client(app) -> TestClient:
    return TestClient(app)


@pytest.fixture(scope="session")
def live_url(app):
    """The service running in a real uvicorn server on a random port."""
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("uvicorn did not start in time")
        time.sleep(0.05)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
