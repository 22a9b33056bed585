from fastapi import APIRouter, HTTPException, Query, status
from typing import Optional

import schemas
from config import settings
from exceptions import OperatorAlgebraError
from isometries import cayley_suite

router = APIRouter(
    prefix="/oracle",
    tags=["oracle"]
)


@router.get("/cayley", response_model=schemas.Report)
def cayley(
    dim: int = Query(settings.DEFAULT_CAYLEY_DIM, ge=1, le=256),
    seed: int = Query(settings.DEFAULT_SEED),
    tol: Optional[float] = Query(None, gt=0),
    instances: int = Query(settings.CAYLEY_INSTANCES, ge=1, le=200),
):
    try:
        return cayley_suite(dim, seed, tol, instances)
    except OperatorAlgebraError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )
