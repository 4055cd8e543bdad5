"""配置管理"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # 扫描配置
    threads: int = Field(default=1, description="扫描时的工作进程数")
    output_dir: Path = Field(default=Path("certificates"), description="证书输出目录")
    log_level: str = Field(default="INFO")
    extra: int = Field(default=5, description="默认的周期性抽样个数，在扫描范围内均匀选取")
    oracle_crosscheck: int = Field(default=0, description="默认的拟多项式交叉校验个数")

    # 服务配置
    host: str = Field(default="0.0.0.0")
    port: int = Field(default=8000)
    debug: bool = Field(default=False)
    api_max_count: int = Field(default=12, description="HTTP 接口同步扫描的最大 count")

    def certificate_path(self, case: str) -> Path:
        """每个 case 一个证书文件"""
        return self.output_dir / f"{case}.json"

    class Config:
        env_prefix = "COVCERT_"
        env_file = ".env"
        env_file_encoding = "utf-8"


settings = Settings()
