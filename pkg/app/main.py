from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from app import __version__
from app.config import get_settings
from app.errors import SpectraError
from app.routers import bounds, graphs, matching
import logging

settings = get_settings()
logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO))
logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="RGG Spectra API",
    description="Spectra, bottleneck matchings and tail bounds for random geometric graphs",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(SpectraError)
async def spectra_error_handler(request: Request, exc: SpectraError):
    logger.error(f"{request.method} {request.url.path}: {exc}")
    return JSONResponse(status_code=422, content={"detail": str(exc)})


# Include routers
app.include_router(bounds.router)
app.include_router(graphs.router)
app.include_router(matching.router)


@app.get("/")
async def root():
    """Endpoint index"""
    return {
        "message": "RGG Spectra API",
        "docs": "/docs",
        "endpoints": {
            "bounds": "POST /bounds",
            "spectrum": "POST /graphs/spectrum",
            "matching": "POST /matching",
            "health": "GET /health",
        },
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "service": "rgg-spectra", "eigen_backend": settings.eigen_backend}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
