"""满秩证书服务 - 构造 M(n)、F_p 上求秩、整周期扫描、JSON 证书"""

import asyncio
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import AsyncGenerator, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app import __version__
from app.algebra.forms import basis
from app.algebra.scalars import IntegralityError, PrimeField
from app.services.coeff_engine import DivisibilityError, GConfig, engine_for, get_case

logger = logging.getLogger(__name__)

STATUS_EXIT_CODES = {
    "full_rank": 0,
    "rank_deficient": 2,
    "integrality_failure": 3,
    "crosscheck_failure": 4,
}


# p² 超过该值时 int64 的乘积会溢出，改用 Python 大整数
INT64_SAFE_MODULUS = 3037000493


def rank_mod_p(matrix, p: int) -> int:
    """F_p 上的行秩（Gauss-Jordan 消元），不修改输入"""
    PrimeField(p)
    mat = np.array(matrix, dtype=object)
    if mat.ndim != 2 or mat.size == 0:
        return 0
    mat = mat % p
    if p <= INT64_SAFE_MODULUS:
        mat = mat.astype(np.int64)
    num_rows, num_cols = mat.shape
    row = 0
    for col in range(num_cols):
        if row >= num_rows:
            break
        pivot_rows = np.nonzero(mat[row:, col])[0]
        if len(pivot_rows) == 0:
            continue
        pivot_row = pivot_rows[0] + row
        if pivot_row != row:
            mat[[row, pivot_row]] = mat[[pivot_row, row]]
        mat[row] = mat[row] * pow(int(mat[row, col]), -1, p) % p
        for r in range(num_rows):
            if r != row and mat[r, col]:
                mat[r] = (mat[r] - mat[r, col] * mat[row]) % p
        row += 1
    return row


class CrossCheck(BaseModel):
    """拟多项式路径与精确路径在某个 n 上的比较"""

    n: int
    agree: bool
    mismatches: int = 0


class PeriodicitySample(BaseModel):
    n: int
    n_shifted: int
    agree: bool
    mismatches: int = 0


class DivisionRecord(BaseModel):
    """在 Z 上不整除的一次二项式除法"""

    n: int
    y_index: int
    t: int
    m: int


class RankCertificate(BaseModel):
    """F_p 上 M(n) 满秩的机器可读记录；字段顺序即 JSON 键顺序"""

    case: str
    covariant: str
    prime: int
    period: int
    n_min: int
    n_start: int
    count: int
    complete: bool
    rows: int
    cols: int
    row_order: List[List[int]]
    column_order: List[str]
    y_forms: List[List[int]]
    ranks: List[int] = Field(default_factory=list)
    all_full_rank: bool = False
    status: str = "full_rank"
    message: Optional[str] = None
    divisions: int = 0
    exact_divisions: int = 0
    non_exact_divisions: List[DivisionRecord] = Field(default_factory=list)
    polynomial_divisions: int = 0
    oracle_crosscheck: List[CrossCheck] = Field(default_factory=list)
    periodicity_samples: List[PeriodicitySample] = Field(default_factory=list)
    tool_version: str = __version__
    wall_time: float = 0.0

    @property
    def exit_code(self) -> int:
        return STATUS_EXIT_CODES[self.status]


class SweepRow(BaseModel):
    """单个 n 的结果，在进程间传递"""

    n: int
    rank: int = 0
    divisions: int = 0
    exact_divisions: int = 0
    inexact: List[Tuple[int, int, int]] = Field(default_factory=list)
    error: Optional[str] = None


def _build_row(case: str, n: int) -> SweepRow:
    cfg = get_case(case)
    try:
        build = engine_for(cfg).matrix_exact(n)
    except (IntegralityError, DivisibilityError) as exc:
        return SweepRow(n=n, error=str(exc))
    return SweepRow(
        n=n,
        rank=rank_mod_p(build.matrix, cfg.p),
        divisions=build.divisions,
        exact_divisions=build.exact_divisions,
        inexact=build.inexact,
    )


def spread(ns: List[int], k: int) -> List[int]:
    """从 ns 中均匀取 k 个，包含首尾"""
    if k <= 0 or not ns:
        return []
    if k >= len(ns):
        return list(ns)
    if k == 1:
        return [ns[0]]
    return [ns[i * (len(ns) - 1) // (k - 1)] for i in range(k)]


def _mismatches(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(a != b))


class CertifierService:
    """扫描服务，按 case 构造矩阵并汇总证书"""

    def new_certificate(self, cfg: GConfig, n_start: int, count: int) -> RankCertificate:
        return RankCertificate(
            case=cfg.case,
            covariant=cfg.kind.value,
            prime=cfg.p,
            period=cfg.period,
            n_min=cfg.n_min,
            n_start=n_start,
            count=count,
            complete=count >= cfg.period,
            rows=cfg.rows,
            cols=cfg.cols,
            row_order=[list(index) for index in basis(cfg.order)],
            column_order=[f"y{y_index + 1}:t=d-{u}" for y_index, u in cfg.columns()],
            y_forms=[list(y.coeffs) for y in cfg.ys],
        )

    def check_range(self, cfg: GConfig, n_start: int, count: int):
        if count < 1:
            raise ValueError(f"count 必须 ≥ 1，得到 {count}")
        if n_start < cfg.n_min:
            raise ValueError(f"case {cfg.case} 要求 n ≥ {cfg.n_min}，得到 n_start={n_start}")

    def build_matrix(self, n: int, cfg: GConfig) -> np.ndarray:
        """M(n) over F_p：行按 basis(4 或 8)，列按 (y, t)"""
        self.check_range(cfg, n, 1)
        return engine_for(cfg).matrix_exact(n).matrix

    def periodicity_samples(
        self, cfg: GConfig, ns: List[int], cache: Optional[Dict[int, np.ndarray]] = None
    ) -> List[PeriodicitySample]:
        """逐元素比较 M(n) 与 M(n + p(p−1))"""
        cache = cache if cache is not None else {}
        engine = engine_for(cfg)
        samples = []
        for n in ns:
            for m in (n, n + cfg.period):
                if m not in cache:
                    cache[m] = engine.matrix_exact(m).matrix
            mismatches = _mismatches(cache[n], cache[n + cfg.period])
            samples.append(
                PeriodicitySample(
                    n=n, n_shifted=n + cfg.period, agree=mismatches == 0, mismatches=mismatches
                )
            )
            logger.debug(f"[{cfg.case}] 周期样本 n={n}: 不一致 {mismatches}")
        return samples

    def oracle_crosscheck(
        self, cfg: GConfig, ns: List[int], cache: Optional[Dict[int, np.ndarray]] = None
    ) -> List[CrossCheck]:
        """拟多项式路径与精确路径逐元素比较"""
        cache = cache if cache is not None else {}
        engine = engine_for(cfg)
        checks = []
        for n in ns:
            if n not in cache:
                cache[n] = engine.matrix_exact(n).matrix
            mismatches = _mismatches(cache[n], engine.matrix_quasi(n))
            checks.append(CrossCheck(n=n, agree=mismatches == 0, mismatches=mismatches))
        return checks

    def _run_rows(self, case: str, ns: List[int], threads: int) -> List[SweepRow]:
        if threads <= 1 or len(ns) <= 1:
            return [_build_row(case, n) for n in ns]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_build_row, [case] * len(ns), ns))

    def sweep(
        self,
        case: str,
        n_start: Optional[int] = None,
        count: Optional[int] = None,
        extra: int = 0,
        oracle_crosscheck: int = 0,
        threads: int = 1,
    ) -> RankCertificate:
        """n_start … n_start+count−1 上的全部秩，count 默认取一个完整周期"""
        cfg = get_case(case)
        n_start = cfg.n_min if n_start is None else n_start
        count = cfg.period if count is None else count
        self.check_range(cfg, n_start, count)
        started = time.perf_counter()
        certificate = self.new_certificate(cfg, n_start, count)
        logger.info(f"[{case}] 开始扫描 n={n_start}..{n_start + count - 1}, p={cfg.p}")

        ns = list(range(n_start, n_start + count))
        for row in self._run_rows(case, ns, threads):
            if row.error is not None:
                logger.error(f"[{case}] n={row.n}: {row.error}")
                certificate.status = "integrality_failure"
                certificate.message = row.error
                break
            certificate.ranks.append(row.rank)
            certificate.divisions += row.divisions
            certificate.exact_divisions += row.exact_divisions
            certificate.non_exact_divisions.extend(
                DivisionRecord(n=row.n, y_index=y_index, t=t, m=m)
                for y_index, t, m in row.inexact
            )

        if certificate.status == "full_rank":
            try:
                certificate.polynomial_divisions = engine_for(cfg).check_divisibility()
                cache: Dict[int, np.ndarray] = {}
                certificate.periodicity_samples = self.periodicity_samples(
                    cfg, spread(ns, extra), cache
                )
                certificate.oracle_crosscheck = self.oracle_crosscheck(
                    cfg, ns[:oracle_crosscheck], cache
                )
            except (IntegralityError, DivisibilityError) as exc:
                logger.error(f"[{case}] {exc}")
                certificate.status = "integrality_failure"
                certificate.message = str(exc)

        certificate.all_full_rank = (
            certificate.status != "integrality_failure"
            and len(certificate.ranks) == count
            and all(rank == cfg.rows for rank in certificate.ranks)
        )
        if certificate.status == "full_rank":
            crosschecks_ok = all(s.agree for s in certificate.periodicity_samples) and all(
                c.agree for c in certificate.oracle_crosscheck
            )
            if not certificate.all_full_rank:
                certificate.status = "rank_deficient"
                deficient = [n for n, rank in zip(ns, certificate.ranks) if rank != cfg.rows]
                certificate.message = f"秩不足的 n: {deficient}"
            elif not crosschecks_ok:
                certificate.status = "crosscheck_failure"
                certificate.message = "交叉校验不一致"

        certificate.wall_time = round(time.perf_counter() - started, 3)
        logger.info(
            f"[{case}] 扫描结束: {certificate.status}, {len(certificate.ranks)} 个秩, "
            f"用时 {certificate.wall_time}s"
        )
        return certificate

    async def sweep_stream(
        self, case: str, n_start: Optional[int] = None, count: int = 1
    ) -> AsyncGenerator[dict, None]:
        """逐个 n 产出结果，最后产出 done 消息"""
        cfg = get_case(case)
        n_start = cfg.n_min if n_start is None else n_start
        self.check_range(cfg, n_start, count)
        ranks = []
        for n in range(n_start, n_start + count):
            row = await asyncio.to_thread(_build_row, case, n)
            if row.error is not None:
                yield {"type": "error", "n": n, "message": row.error}
                return
            ranks.append(row.rank)
            yield {
                "type": "rank",
                "n": n,
                "rank": row.rank,
                "full_rank": row.rank == cfg.rows,
            }
        yield {
            "type": "done",
            "case": case,
            "ranks": ranks,
            "all_full_rank": all(rank == cfg.rows for rank in ranks),
        }

    def write_certificate(self, certificate: RankCertificate, path: Path) -> Path:
        """UTF-8 JSON，键顺序固定"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(certificate.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"证书已写入 {path}")
        return path


# 全局实例
certifier_service = CertifierService()
