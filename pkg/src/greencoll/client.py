"""Thin HTTP client for a remote greencoll service."""

from __future__ import annotations

import httpx

from .errors import GreencollError


class ServiceError(GreencollError):
    """The remote service rejected a request."""


class ServiceClient:
    """Talks to a running service; the CLI uses this in ``--server`` mode."""

    def __init__(self, base_url: str, transport: httpx.BaseTransport | None = None,
                 timeout: float = 24 * 3600.0):
        # Benchmarks can legitimately run for hours, hence the long timeout.
        self._client = httpx.Client(base_url=base_url, transport=transport, timeout=timeout)

    def close(self) -> None:
        self._client.close()

    def _checked(self, response: httpx.Response) -> httpx.Response:
        if response.is_success:
            return response
        try:
            detail = response.json()
        except ValueError:
            detail = response.text
        raise ServiceError(f"service returned {response.status_code}: {detail}")

    def registry_document(self) -> dict:
        return self._checked(self._client.get("/registry")).json()

    def workloads_document(self) -> dict:
        return self._checked(self._client.get("/workloads")).json()

    def bench(self, request: dict) -> dict:
        return self._checked(self._client.post("/bench", json=request)).json()

    def advise(self, table_document: dict, usage_document: dict, weighted: bool = False) -> dict:
        payload = {"table": table_document, "usage": usage_document, "weighted": weighted}
        return self._checked(self._client.post("/advise", json=payload)).json()

    def report(self, table_document: dict, format: str = "tty",
               exclude_methods: list[str] | None = None,
               include_timestamp: bool = True) -> str:
        payload = {
            "table": table_document,
            "format": format,
            "exclude_methods": exclude_methods or [],
            "include_timestamp": include_timestamp,
        }
        return self._checked(self._client.post("/report", json=payload)).text
