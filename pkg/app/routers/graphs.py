from fastapi import APIRouter
from app import schemas
from app.cache import cache
from app.services.geometry import make_grid, radius, sample_uniform
from app.services.graph import build_rgg
from app.services.spectra import walk_spectrum
import logging

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/graphs", tags=["graphs"])


@router.post("/spectrum", response_model=schemas.SpectrumResponse)
async def graph_spectrum(request: schemas.GraphRequest):
    """SRW spectrum of a sampled or grid RGG with n = side^dim"""
    key = request.model_dump()
    cached = cache.get("spectrum", **key)
    if cached is not None:
        return cached

    n = request.side ** request.dim
    if request.kind == "grid":
        points = make_grid(request.side, request.dim)
    else:
        points = sample_uniform(n, request.dim, request.seed)
    r = request.r or radius(request.schedule, n, request.dim)
    spectrum = walk_spectrum(build_rgg(points, r))
    logger.info(f"spectrum of {request.kind} graph n={n} d={request.dim} r={r:.4g}")

    result = schemas.SpectrumResponse(
        kind=request.kind,
        n=n,
        dim=request.dim,
        r=r,
        connected=bool(spectrum.connected),
        eigenvalues=spectrum.values.tolist(),
    )
    cache.set("spectrum", result, **key)
    return result
