from fastapi import APIRouter
from app import schemas
from app.services.geometry import make_grid, radius, sample_uniform
from app.services.matching import bottleneck_matching
import logging

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/matching", tags=["matching"])


@router.post("", response_model=schemas.MatchResponse)
async def match_to_grid(request: schemas.MatchRequest):
    """Bottleneck matching of a uniform sample onto the centred grid"""
    n = request.side ** request.dim
    X = sample_uniform(n, request.dim, request.seed)
    D = make_grid(request.side, request.dim)
    matching = bottleneck_matching(X, D)
    r = radius(request.schedule, n, request.dim)
    return schemas.MatchResponse(
        n=n,
        dim=request.dim,
        bottleneck=matching.bottleneck,
        r=r,
        M_over_r=matching.bottleneck / r,
        forward=matching.forward.tolist(),
    )
