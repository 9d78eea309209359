"""HTTP transport for the embedding boundary (used by the browser sandbox).

One POST endpoint carries boundary messages; static files (the built
sandbox, if present) are served from a directory given on the command line.
Requires the `web` extra (fastapi + uvicorn).
"""

from __future__ import annotations

import argparse
import os


def create_app(static_dir: str | None = None):
    from fastapi import FastAPI, Request
    from fastapi.middleware.cors import CORSMiddleware
    from fastapi.responses import JSONResponse

    from .boundary import Boundary

    app = FastAPI(title="sibylog boundary")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    boundary = Boundary()
    app.state.boundary = boundary

    @app.post("/rpc")
    async def rpc(request: Request):
        msg = await request.json()
        return JSONResponse(await boundary.handle(msg))

    @app.get("/health")
    async def health():
        return {"ok": True}

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sibylog-server")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8751)
    parser.add_argument("--static", default=None,
                        help="directory with the built sandbox to serve at /")
    args = parser.parse_args(argv)
    import uvicorn

    uvicorn.run(create_app(args.static), host=args.host, port=args.port,
                log_level="warning")
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
