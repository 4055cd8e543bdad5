"""命令行界面"""

import sys
from pathlib import Path
from typing import Optional

import typer

try:  # typer >= 0.26 vendors click; its exceptions live in typer._click
    from typer._click import exceptions as click
except ImportError:
    import click
from rich.panel import Panel
from rich.table import Table

from app.algebra.covariants import Covariant, check_triple_structure
from app.config import settings
from app.services import CASES, certifier_service
from app.services.certifier import RankCertificate
from app.utils import console, setup_logging

app = typer.Typer(help="covcert - 协变量 S_d / T_d 的 F_p 满秩证书")
certify_app = typer.Typer(help="生成 M(n) 的满秩证书")


def print_certificate(certificate: RankCertificate):
    """打印证书摘要"""
    table = Table(
        title=f"case {certificate.case} ({certificate.covariant}_d, p={certificate.prime})"
    )
    table.add_column("项目", style="cyan")
    table.add_column("值")
    last_n = certificate.n_start + certificate.count - 1
    table.add_row("n 范围", f"{certificate.n_start}..{last_n}")
    table.add_row("矩阵", f"{certificate.rows} x {certificate.cols}")
    table.add_row("周期", f"{certificate.period} ({'完整' if certificate.complete else '不完整'})")
    if certificate.ranks:
        table.add_row("秩", f"min {min(certificate.ranks)}, max {max(certificate.ranks)}")
    table.add_row("Z 上整除", f"{certificate.exact_divisions}/{certificate.divisions}")
    if certificate.polynomial_divisions:
        table.add_row("F_p[n] 整除检查", f"{certificate.polynomial_divisions} 列")
    if certificate.periodicity_samples:
        agree = sum(s.agree for s in certificate.periodicity_samples)
        table.add_row("周期样本", f"{agree}/{len(certificate.periodicity_samples)} 一致")
    if certificate.oracle_crosscheck:
        agree = sum(c.agree for c in certificate.oracle_crosscheck)
        table.add_row("拟多项式校验", f"{agree}/{len(certificate.oracle_crosscheck)} 一致")
    table.add_row("用时", f"{certificate.wall_time}s")
    console.print(table)

    if certificate.exit_code == 0:
        console.print(Panel("全部 M(n) 满秩", title="✅ 通过", border_style="green"))
    else:
        print_error(f"{certificate.status}: {certificate.message}")


def print_error(message: str):
    """打印错误"""
    console.print(Panel(message, title="❌ 错误", border_style="red"))


def certify(
    case: str = typer.Option(..., "--case", "-c", help="d1 (d=3n+1) 或 d2 (d=3n+2)"),
    n_start: Optional[int] = typer.Option(None, "--n-start", help="起始 n，默认取有效下界"),
    count: Optional[int] = typer.Option(None, "--count", help="n 的个数，默认一个周期"),
    extra: Optional[int] = typer.Option(None, "--extra", help="周期性抽样个数"),
    oracle_crosscheck: Optional[int] = typer.Option(
        None, "--oracle-crosscheck", help="拟多项式交叉校验个数"
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="证书 JSON 路径"),
    threads: Optional[int] = typer.Option(None, "--threads", "-t", help="工作进程数"),
    log_level: str = typer.Option(settings.log_level, "--log-level", help="日志级别"),
):
    """扫描 M(n) 并写出满秩证书"""
    setup_logging(log_level)
    if case not in CASES:
        raise typer.BadParameter(f"可选 {', '.join(CASES)}", param_hint="--case")

    try:
        certificate = certifier_service.sweep(
            case,
            n_start=n_start,
            count=count,
            extra=settings.extra if extra is None else extra,
            oracle_crosscheck=(
                settings.oracle_crosscheck if oracle_crosscheck is None else oracle_crosscheck
            ),
            threads=settings.threads if threads is None else threads,
        )
    except ValueError as exc:
        raise typer.BadParameter(str(exc))

    path = certifier_service.write_certificate(
        certificate, out or settings.certificate_path(case)
    )
    print_certificate(certificate)
    console.print(f"[dim]证书: {path}[/dim]")
    raise typer.Exit(code=certificate.exit_code)


app.command()(certify)
certify_app.command()(certify)


@app.command()
def triple(
    degree: int = typer.Option(7, "--degree", "-d", help="S: 4 或 7；T: 5 或 8"),
    kind: Covariant = typer.Option(Covariant.S, "--kind", "-k", help="S 或 T"),
    log_level: str = typer.Option(settings.log_level, "--log-level", help="日志级别"),
):
    """检查小次数展开的权方程与三重结构"""
    setup_logging(log_level)
    try:
        report = check_triple_structure(degree, kind)
    except ValueError as exc:
        raise typer.BadParameter(str(exc))

    if report.passed:
        console.print(Panel(report.summary(), title="✅ 三重结构", border_style="green"))
        return
    for mono in report.violators[:10]:
        console.print(f"[red]违例[/red] i={mono.i} j={mono.j} k={mono.k} l={mono.l} e={mono.e}")
    print_error(report.summary())
    raise typer.Exit(code=2)


@app.command()
def serve(
    host: str = typer.Option(settings.host, "--host", "-h", help="监听地址"),
    port: int = typer.Option(settings.port, "--port", "-p", help="监听端口"),
    reload: bool = typer.Option(False, "--reload", "-r", help="热重载"),
):
    """启动 Web 服务器"""
    import uvicorn

    setup_logging(settings.log_level)
    console.print(f"[bold green]启动服务器: http://{host}:{port}[/bold green]")
    uvicorn.run("app.main:app", host=host, port=port, reload=reload)


def _run(typer_app: typer.Typer):
    """用法错误退出码为 1，避开 2（秩不足）"""
    command = typer.main.get_command(typer_app)
    try:
        code = command.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(1)
    sys.exit(code if isinstance(code, int) else 0)


def main():
    _run(app)


def certify_main():
    """单独的 certify 脚本"""
    _run(certify_app)


if __name__ == "__main__":
    main()
