"""Entry point: configure from the environment and run uvicorn."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .settings import Settings


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mlservice-serve",
        description="Serve span extraction and text embedding models.",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    app = create_app(Settings.from_env())
    uvicorn.run(app, host=args.host, port=args.port, workers=args.workers)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
