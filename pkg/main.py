from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from config import settings
from routes import families, oracle
import logging
import time
import os
import uvicorn

logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL, logging.WARNING))
logger = logging.getLogger(__name__)

app = FastAPI(
    title="Partial Isometry Algebra API",
    description="""
    ## Classification of C*-algebras generated by partial isometries

    ### Features:
    - **Classify** - *-isomorphic indices, G-graph and block structure of a family
    - **Groupoid** - bounded enumeration of the graph groupoid
    - **Verify** - symbolic predictions checked against concrete matrices
    - **Cayley** - Cayley transform and rank-one defect checks

    """,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
    expose_headers=["X-Process-Time"],
)


# Request timing middleware
@app.middleware("http")
async def add_process_time_header(request: Request, call_next):
    start_time = time.time()
    response = await call_next(request)
    process_time = time.time() - start_time
    response.headers["X-Process-Time"] = str(process_time)
    return response


@app.get("/", tags=["Root"])
def read_root():
    return {
        "title": app.title,
        "environment": settings.ENVIRONMENT,
        "endpoints": {
            "classify": "/families/classify",
            "groupoid": "/families/groupoid",
            "verify": "/families/verify",
            "cayley": "/oracle/cayley",
            "docs": "/docs",
            "health": "/health"
        }
    }


@app.get("/health", tags=["Health"])
def health_check():
    return {
        "status": "healthy",
        "environment": settings.ENVIRONMENT,
        "default_depth": settings.DEFAULT_DEPTH,
        "timestamp": time.time()
    }


app.include_router(families.router)
app.include_router(oracle.router)


if __name__ == "__main__":
    port = int(os.environ.get("PORT", 8000))
    uvicorn.run("main:app", host="0.0.0.0", port=port)
