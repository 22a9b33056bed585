from fastapi import APIRouter, HTTPException, status
import logging

import schemas
from exceptions import AdmissibilityError, OperatorAlgebraError
from isometries import FamilyAnalyzer, parse_family

logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/families",
    tags=["families"]
)


def _analyzer(request: schemas.FamilyRequest, max_len=None) -> FamilyAnalyzer:
    family = parse_family(request.content, source="<request>")
    return FamilyAnalyzer(family, depth=request.depth, max_len=max_len, tol=request.tol)


def _raise_http(e: OperatorAlgebraError):
    if isinstance(e, AdmissibilityError):
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail={"message": "invalid pi table", "violations": e.violations}
        )
    raise HTTPException(
        status_code=status.HTTP_400_BAD_REQUEST,
        detail=str(e)
    )


@router.post("/classify", response_model=schemas.Report)
def classify(request: schemas.FamilyRequest):
    try:
        return _analyzer(request).classify()
    except OperatorAlgebraError as e:
        logger.warning(f"classify rejected: {e}")
        _raise_http(e)


@router.post("/groupoid")
def groupoid(request: schemas.GroupoidRequest):
    try:
        report, dot = _analyzer(request, max_len=request.max_len).groupoid(emit_dot=request.emit_dot)
    except OperatorAlgebraError as e:
        logger.warning(f"groupoid rejected: {e}")
        _raise_http(e)
    body = report.model_dump(mode="json")
    if dot is not None:
        body["results"]["dot"] = dot
    return body


@router.post("/verify", response_model=schemas.Report)
def verify(request: schemas.FamilyRequest):
    try:
        return _analyzer(request).verify()
    except OperatorAlgebraError as e:
        logger.warning(f"verify rejected: {e}")
        _raise_http(e)
