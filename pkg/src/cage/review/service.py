"""HTTP surface over the review store.

    GET  /healthz                liveness probe
    GET  /queue/next             lease the oldest pending candidate
    POST /decision               submit an accept/reject verdict
    GET  /stats                  queue counters and first-attempt pass rate
    GET  /pair/{id}              candidate metadata + verification JSON
    GET  /pair/{id}/prog.png     programmatic render
    GET  /pair/{id}/candidate.png  stylized candidate

The reviewer identity rides in the ``X-Reviewer`` header (or ``reviewer``
query parameter); there is no further authentication.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Query
from fastapi.responses import FileResponse
from pydantic import BaseModel

from cage.errors import LeaseError, StoreError
from cage.review.store import ReviewDecision, ReviewStore


class DecisionBody(BaseModel):
    pair_id: str
    verdict: str
    failed_criteria: list[str] = []
    adjusted_strength: float | None = None
    reviewer: str | None = None


def create_app(store: ReviewStore) -> FastAPI:
    app = FastAPI(title="diagram pair review service")

    def _reviewer(header: str | None, query: str | None) -> str:
        return header or query or "anonymous"

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/queue/next")
    def queue_next(x_reviewer: str | None = Header(default=None),
                   reviewer: str | None = Query(default=None)):
        item = store.next_candidate(_reviewer(x_reviewer, reviewer))
        if item is None:
            return {"candidate": None}
        return {"candidate": item.to_dict()}

    @app.post("/decision")
    def decision(body: DecisionBody,
                 x_reviewer: str | None = Header(default=None)):
        try:
            d = ReviewDecision(
                pair_id=body.pair_id,
                verdict=body.verdict,
                failed_criteria=tuple(body.failed_criteria),
                adjusted_strength=body.adjusted_strength,
                reviewer=_reviewer(x_reviewer, body.reviewer),
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            stats = store.submit_decision(d)
        except LeaseError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except StoreError as exc:
            status = 404 if "unknown pair" in str(exc) else 409
            raise HTTPException(status_code=status, detail=str(exc)) from exc
        return {"decision": d.to_dict(), "stats": stats}

    @app.get("/stats")
    def stats():
        return store.queue_stats()

    @app.get("/pair/{pair_id}")
    def pair(pair_id: str):
        try:
            item = store.get_candidate(pair_id)
        except StoreError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        payload = item.to_dict()
        payload["prog_url"] = f"/pair/{pair_id}/prog.png"
        payload["candidate_url"] = f"/pair/{pair_id}/candidate.png"
        return payload

    def _image(pair_id: str, which: str) -> FileResponse:
        try:
            item = store.get_candidate(pair_id)
        except StoreError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        path = Path(item.prog_path if which == "prog" else item.candidate_path)
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"image file missing: {path}")
        return FileResponse(path, media_type="image/png")

    @app.get("/pair/{pair_id}/prog.png")
    def pair_prog(pair_id: str):
        return _image(pair_id, "prog")

    @app.get("/pair/{pair_id}/candidate.png")
    def pair_candidate(pair_id: str):
        return _image(pair_id, "candidate")

    return app
