from fastapi import APIRouter
from app import schemas
from app.services import bounds
from app.services.geometry import radius
import logging

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/bounds", tags=["bounds"])


@router.post("", response_model=schemas.BoundsResponse)
async def evaluate_bounds(request: schemas.BoundsRequest):
    """Closed-form tail bounds at (n, d, r, t, c_d); r defaults to the request's schedule"""
    r = request.r or radius(request.schedule, request.n, request.d)
    params = schemas.BoundParams(n=request.n, d=request.d, r=r, t=request.t, c_d=request.c_d, m_plus_over_r=request.q)
    a = bounds.a_of_n(request.n, request.d, r)
    hs = bounds.hs_tail_bound(params)
    ws = bounds.ws_tail_bound(params)
    return schemas.BoundsResponse(
        n=request.n,
        d=request.d,
        r=r,
        t=request.t,
        a_n=a,
        hs_bound=hs,
        hs_informative=bounds.is_informative(hs),
        hs_bound_terms=list(bounds.hs_tail_bound_terms(params)),
        ws_bound=ws,
        ws_informative=bounds.is_informative(ws),
        reciprocal_bound=bounds.reciprocal_tail_bound(request.t, a),
        c_d_feasible=bounds.c_d_feasible(request.t, request.q, request.d),
    )
