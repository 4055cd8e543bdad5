"""FastAPI 主应用"""

from fastapi import FastAPI

from app import __version__
from app.api import router
from app.config import settings

app = FastAPI(
    title="covcert",
    description="协变量 S_d / T_d 的 F_p 满秩证书",
    version=__version__,
)

# 注册路由
app.include_router(router)


@app.get("/")
async def index():
    return {"message": "covcert API", "docs": "/docs"}


@app.get("/health")
async def health():
    """健康检查"""
    return {"status": "ok"}


def run():
    """运行服务器"""
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
    )


if __name__ == "__main__":
    run()
