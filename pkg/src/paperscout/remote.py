"""Shared plumbing for the remote extraction/embedding/search services."""

from __future__ import annotations

from dataclasses import dataclass

import requests


@dataclass(frozen=True)
class ServiceEndpoint:
    """Base URL of a remote service plus transport settings."""

    url: str
    timeout_s: float = 30.0
    min_interval_s: float = 0.0  # rate limit between consecutive requests


class RemoteServiceError(RuntimeError):
    """Transport failure or malformed payload from a remote service."""

    def __init__(self, endpoint: ServiceEndpoint, message: str, cause: Exception | None = None):
        super().__init__(f"{endpoint.url}: {message}")
        self.endpoint = endpoint
        self.cause = cause


def post_json(endpoint: ServiceEndpoint, path: str, payload: dict) -> dict:
    """POST a JSON payload and return the decoded JSON response.

    Any transport error, non-2xx status, or non-object JSON body raises
    RemoteServiceError carrying the endpoint and the underlying cause.
    """
    url = endpoint.url.rstrip("/") + path
    try:
        response = requests.post(url, json=payload, timeout=endpoint.timeout_s)
        response.raise_for_status()
        body = response.json()
    except requests.RequestException as exc:
        raise RemoteServiceError(endpoint, f"request to {path} failed: {exc}", exc) from exc
    except ValueError as exc:
        raise RemoteServiceError(endpoint, f"{path} returned invalid JSON: {exc}", exc) from exc
    if not isinstance(body, dict):
        raise RemoteServiceError(endpoint, f"{path} returned {type(body).__name__}, expected object")
    return body


def get_text(endpoint: ServiceEndpoint, params: dict) -> str:
    """GET the endpoint URL itself and return the response body text."""
    try:
        response = requests.get(endpoint.url, params=params, timeout=endpoint.timeout_s)
        response.raise_for_status()
        return response.text
    except requests.RequestException as exc:
        raise RemoteServiceError(endpoint, f"request failed: {exc}", exc) from exc
