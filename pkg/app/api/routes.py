"""API 路由"""

import asyncio
import json

import numpy as np
from fastapi import APIRouter, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from app.algebra.scalars import PrimeField
from app.config import settings
from app.services import CASES, certifier_service, get_case, rank_mod_p

router = APIRouter()


def _parse_int(data: dict, key: str, default=None):
    value = data.get(key)
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{key} 必须是整数")
    return value


@router.post("/api/certify")
async def certify(request: Request):
    """短扫描，count 不超过 api_max_count"""
    data = await request.json()
    case = data.get("case", "")
    if case not in CASES:
        return JSONResponse({"error": f"case 必须是 {', '.join(CASES)} 之一"}, status_code=400)

    try:
        n_start = _parse_int(data, "n_start")
        count = _parse_int(data, "count", 1)
        extra = _parse_int(data, "extra", 0)
    except ValueError as exc:
        return JSONResponse({"error": str(exc)}, status_code=400)
    if count > settings.api_max_count:
        return JSONResponse(
            {"error": f"count 超过上限 {settings.api_max_count}，请使用 CLI 或 /ws/sweep"},
            status_code=400,
        )

    try:
        certificate = await asyncio.to_thread(
            certifier_service.sweep, case, n_start, count, extra
        )
    except ValueError as exc:
        return JSONResponse({"error": str(exc)}, status_code=400)
    return JSONResponse(certificate.model_dump())


@router.post("/api/rank")
async def rank(request: Request):
    """整数矩阵在 F_p 上的秩"""
    data = await request.json()
    matrix = data.get("matrix")
    p = data.get("p")

    if not isinstance(matrix, list) or not isinstance(p, int):
        return JSONResponse({"error": "需要 matrix（整数二维数组）和 p"}, status_code=400)
    try:
        PrimeField(p)
        array = np.array(matrix, dtype=object)
        if array.ndim != 2 or not all(isinstance(v, int) for v in array.flat):
            raise ValueError("matrix 必须是整数二维数组")
    except (TypeError, ValueError) as exc:
        return JSONResponse({"error": str(exc)}, status_code=400)

    return JSONResponse({"rank": rank_mod_p(matrix, p), "rows": len(matrix), "p": p})


@router.get("/api/matrix/{case}/{n}")
async def matrix(case: str, n: int):
    """约化后的 M(n)"""
    if case not in CASES:
        return JSONResponse({"error": f"未知的 case: {case}"}, status_code=400)
    cfg = get_case(case)
    try:
        result = await asyncio.to_thread(certifier_service.build_matrix, n, cfg)
    except ValueError as exc:
        return JSONResponse({"error": str(exc)}, status_code=400)
    return JSONResponse(
        {
            "case": case,
            "n": n,
            "prime": cfg.p,
            "rows": cfg.rows,
            "cols": cfg.cols,
            "matrix": result.tolist(),
        }
    )


# ==================== WebSocket ====================

@router.websocket("/ws/sweep")
async def websocket_sweep(websocket: WebSocket):
    """逐个 n 推送秩，最后推送 done"""
    await websocket.accept()

    try:
        while True:
            data = await websocket.receive_text()
            try:
                request = json.loads(data)
                case = request.get("case", "")
                if case not in CASES:
                    raise ValueError(f"case 必须是 {', '.join(CASES)} 之一")
                stream = certifier_service.sweep_stream(
                    case, request.get("n_start"), int(request.get("count", 1))
                )
                async for message in stream:
                    await websocket.send_json(message)
            except (ValueError, TypeError, AttributeError) as exc:
                await websocket.send_json({"type": "error", "message": str(exc)})

    except WebSocketDisconnect:
        pass
