"""Pluggable decision oracles.

Five roles sit behind one interface: decomposer, planner, coder,
reviewer, library_learner. The mock oracle replays a canned transcript
for offline runs; the HTTP oracle forwards requests to a service.
"""
from __future__ import annotations

import base64
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

ROLES = ("decomposer", "planner", "coder", "reviewer", "library_learner")


class OracleProtocolError(ValueError):
    """The oracle answered, but not in the role's expected shape."""


class OracleUnavailable(RuntimeError):
    """The oracle cannot be reached at all; the run fails."""


class UnmatchedOracleCall(RuntimeError):
    """A mock transcript has no entry left for this request."""


@dataclass(frozen=True)
class OracleRequest:
    role: str
    prompt: str
    image: bytes | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown oracle role {self.role!r}")


def load_prompt(name: str) -> str:
    return resources.files("layoutsmith.prompts").joinpath(
        f"{name}.txt").read_text(encoding="utf-8")


class MockOracle:
    """Replays a transcript: an ordered list of entries

        {"role": ..., "match": optional substring, "response": ...}

    Each request consumes the first unconsumed entry whose role matches
    and whose "match" text (when present) occurs in the prompt. A request
    with no matching entry left fails the whole run: transcripts are
    complete scripts, not suggestions.
    """

    def __init__(self, entries: list[dict]):
        self._entries = []
        for i, raw in enumerate(entries):
            if not isinstance(raw, dict) or "role" not in raw:
                raise ValueError(f"transcript entry {i} lacks a role")
            if raw["role"] not in ROLES:
                raise ValueError(f"transcript entry {i} has unknown role "
                                 f"{raw['role']!r}")
            self._entries.append(raw)
        self._consumed = [False] * len(self._entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "MockOracle":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise OracleUnavailable(f"transcript not found: {path}")
        except json.JSONDecodeError as exc:
            raise OracleUnavailable(f"transcript is not valid JSON: {exc}")
        entries = data.get("entries") if isinstance(data, dict) else data
        if not isinstance(entries, list):
            raise OracleUnavailable(f"transcript {path} has no entry list")
        return cls(entries)

    def ask(self, request: OracleRequest):
        for i, entry in enumerate(self._entries):
            if self._consumed[i] or entry["role"] != request.role:
                continue
            needle = entry.get("match")
            if needle is not None and needle not in request.prompt:
                continue
            self._consumed[i] = True
            if "response" not in entry:
                raise OracleProtocolError(
                    f"transcript entry {i} has no response")
            return entry["response"]
        head = request.prompt[:80].replace("\n", " ")
        raise UnmatchedOracleCall(
            f"no transcript entry left for role={request.role} "
            f"prompt={head!r}")

    @property
    def exhausted(self) -> bool:
        return all(self._consumed)


class HttpOracle:
    """POSTs {"role", "prompt", "image_base64"?} as JSON and expects a
    JSON body back. Bearer token read from the ORACLE_TOKEN env var."""

    def __init__(self, url: str, timeout: float = 30.0,
                 token_env: str = "ORACLE_TOKEN"):
        self.url = url
        self.timeout = timeout
        self.token_env = token_env

    def ask(self, request: OracleRequest):
        import requests
        payload: dict = {"role": request.role, "prompt": request.prompt}
        if request.image is not None:
            payload["image_base64"] = base64.b64encode(
                request.image).decode("ascii")
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        try:
            resp = requests.post(self.url, json=payload, headers=headers,
                                 timeout=self.timeout)
        except requests.RequestException as exc:
            raise OracleUnavailable(f"oracle POST failed: {exc}")
        if resp.status_code != 200:
            raise OracleProtocolError(
                f"oracle returned HTTP {resp.status_code}")
        try:
            return resp.json()
        except ValueError:
            raise OracleProtocolError("oracle body is not valid JSON")
