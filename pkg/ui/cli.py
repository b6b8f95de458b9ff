"""
命令行前端
子命令 lemma-n、transform、convolve、chars、recover、strip、window、wordlen；
结果写入标准输出或 --out 指定的文件（先写临时文件再重命名），日志与错误信息写入标准错误流
"""
import argparse
import cmath
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.data_models import GeneratingBox, GenChar, TmSpec
from services.beurling import BeurlingError, divergence_witness, strip_sweep
from services.characters import (
    CharacterError, check_inner_containment, check_outer_containment, enumerate_characters, evaluate, growth_bounds,
    root_of_unity,
)
from services.conv_algebra import ConvolutionAlgebraError, convolve, gelfand_transform
from services.file_manager import FileManagerError
from services.group_model import GroupModelError, make_element, word_length
from services.input_reader import InputProcessingError, InputReader
from services.lemma_escape import (
    LemmaEscapeError, NoEscapeWithinCapError, compute_N, verify_certificate,
)
from services.recovery import (
    NotMultiplicativeError, RecoveryError, as_rows, fit_parametric, probe_multiplicativity, recover_character,
    sample_grid,
)
from services.report_generator import ReportGenerator, character_to_dict, function_to_dict
from utils.config_loader import ConfigLoader, ConfigValidationError
from utils.logger import LoggerSetup


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION_FAILED = 2

# 映射为退出码 1 的异常
USAGE_ERRORS = (
    InputProcessingError, FileManagerError, ConfigValidationError, GroupModelError, CharacterError,
    ConvolutionAlgebraError, LemmaEscapeError, RecoveryError, BeurlingError, ValueError, OSError,
)


class CliUsageError(Exception):
    """命令行用法错误"""
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """用法错误抛出异常，由 main 统一映射为退出码 1"""

    def error(self, message):
        raise CliUsageError(f"{self.prog}: {message}")


@dataclass
class CliConfig:
    """一次调用的完整参数"""
    subcommand: str
    inputs: Tuple[str, ...] = ()
    output: Optional[str] = None
    grid: Tuple[int, int] = (3, 3)
    re_range: Tuple[float, float] = (-1.0, 1.0)
    im_range: Tuple[float, float] = (-1.0, 1.0)
    tolerances: Dict[str, float] = field(default_factory=dict)
    parallel: int = 1
    seed: int = 0
    float_digits: int = 17

    def __post_init__(self):
        if any(count < 2 for count in self.grid):
            raise CliUsageError(f"网格点数必须 ≥ 2: {self.grid[0]}x{self.grid[1]}")
        for name, value in self.tolerances.items():
            if value < 0:
                raise CliUsageError(f"容差 {name} 不能为负数: {value}")
        if self.parallel < 1:
            raise CliUsageError(f"--parallel 必须 ≥ 1: {self.parallel}")
        for lo, hi in (self.re_range, self.im_range):
            if lo > hi:
                raise CliUsageError(f"范围下界大于上界: {lo}:{hi}")

    def axis_values(self) -> Tuple[np.ndarray, np.ndarray]:
        """z 网格的实部与虚部取值（含端点）"""
        return (np.linspace(self.re_range[0], self.re_range[1], self.grid[0]),
                np.linspace(self.im_range[0], self.im_range[1], self.grid[1]))


def _parse_grid(text: str) -> Tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise CliUsageError(f"--grid 的格式必须是 AxB: {text}")


def _parse_range(text: str) -> Tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise CliUsageError(f"范围的格式必须是 lo:hi: {text}")


def _parse_number(text: str):
    try:
        value = float(text)
    except ValueError:
        raise CliUsageError(f"不是数值: {text}")
    return int(value) if value.is_integer() else value


def _add_common_options(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--config", default=default, help="配置文件（缺省读取当前目录的 config.json）")
    parser.add_argument("--seed", type=int, default=default, help="随机种子")
    parser.add_argument("--parallel", type=int, default=default, help="并行线程数")
    parser.add_argument("--out", default=default, help="输出文件；缺省写到标准输出")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lcachar", description="局部紧阿贝尔群上广义特征的数值工具")
    _add_common_options(parser, None)
    # 公共选项既可写在子命令前也可写在子命令后
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="subcommand", parser_class=_ArgumentParser)
    sub.required = True

    p = sub.add_parser("lemma-n", parents=[common], help="构造逃逸上界 N 的证书")
    p.add_argument("m")
    p.add_argument("eps")
    p.add_argument("--verify", action="store_true", help="用暴力网格验证证书")
    p.add_argument("--grid", help="验证网格 角度数x半径数")

    p = sub.add_parser("transform", parents=[common], help="Gel'fand 变换的 z 网格扫描")
    p.add_argument("function")
    p.add_argument("--grid", default="3x3")
    p.add_argument("--re-range", default="-1:1", help="实部范围 lo:hi，负下界写成 --re-range=-2:2")
    p.add_argument("--im-range", default="-1:1", help="虚部范围 lo:hi")

    p = sub.add_parser("convolve", parents=[common], help="两个函数的卷积")
    p.add_argument("first")
    p.add_argument("second")

    p = sub.add_parser("chars", parents=[common], help="枚举有限群的特征")
    p.add_argument("orders", nargs="+", type=int)

    p = sub.add_parser("recover", parents=[common], help="由乘性泛函恢复特征")
    p.add_argument("function")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--functional", help="泛函描述（JSON 文本或文件）")
    group.add_argument("--hidden", help="隐藏特征（JSON 文本或文件），等价于 gelfand 泛函")
    p.add_argument("--span", type=int, default=2, help="采样网格半径（网格步数）")
    p.add_argument("--fit", action="store_true", help="输出拟合的特征参数 JSON，而不是逐点取值")

    p = sub.add_parser("strip", parents=[common], help="带形区域内的变换界扫描")
    p.add_argument("function", nargs="?")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--grid", default="3x3")
    p.add_argument("--re-range", default=None)
    p.add_argument("--im-range", default="-1:1")
    p.add_argument("--witness", type=complex, help="改为输出 z 处的发散见证")

    p = sub.add_parser("window", parents=[common], help="H(ℝ) 窗口 W_{n,ε} 的内外盒包含检查")
    p.add_argument("n", type=int)
    p.add_argument("eps", type=float)
    p.add_argument("--delta", type=float, help="内盒参数，缺省取 eps")
    p.add_argument("--count", type=int, default=1000, help="每项检查的样本数")

    p = sub.add_parser("wordlen", parents=[common], help="相对生成盒的字长")
    p.add_argument("--group", required=True, help="群描述 JSON")
    p.add_argument("--box", default="", help="实因子半宽，逗号分隔")
    p.add_argument("--element", required=True, help='{"real": [...], "ints": [...], "residues": [...]}')
    p.add_argument("--m", type=int, help="同时给出 T_m 增长界（特征由 --char 给出，缺省为平凡特征）")
    p.add_argument("--char", help="特征 JSON，配合 --m 计算 |α(t)|")
    return parser


class CliApp:
    """命令行应用"""

    def __init__(self, args: argparse.Namespace):
        config_path = args.config or "config.json"
        if args.config and not os.path.exists(args.config):
            raise ConfigValidationError(f"配置文件不存在: {args.config}")
        self.config = ConfigLoader(config_path).load_config()
        self.app_logger = LoggerSetup.setup_package_loggers(self.config["logging_config"])
        self.args = args
        cli_defaults = self.config["cli_config"]
        self.seed = args.seed if args.seed is not None else cli_defaults["seed"]
        self.parallel = args.parallel if args.parallel is not None else cli_defaults["parallel"]
        self.reader = InputReader()
        self.reporter = ReportGenerator(cli_defaults["float_digits"])

    def cli_config(self, inputs: Sequence[str] = (), grid: str = "3x3",
                   re_range: str = "-1:1", im_range: str = "-1:1") -> CliConfig:
        return CliConfig(
            subcommand=self.args.subcommand,
            inputs=tuple(inputs),
            output=self.args.out,
            grid=_parse_grid(grid),
            re_range=_parse_range(re_range),
            im_range=_parse_range(im_range),
            tolerances=dict(self.config["tolerance_config"]),
            parallel=self.parallel,
            seed=self.seed,
            float_digits=self.config["cli_config"]["float_digits"],
        )

    def emit_json(self, payload, output: Optional[str]) -> None:
        if output:
            self.reporter.write_json(payload, output)
        else:
            sys.stdout.write(self.reporter.render_json(payload))

    def emit_rows(self, rows: List[Dict], columns: Sequence[str], output: Optional[str], title: str) -> None:
        """有 --out 时按扩展名写 CSV 或 Excel，否则把 CSV 写到标准输出"""
        if output:
            self.reporter.write_rows(rows, columns, output, title)
        else:
            sys.stdout.write(self.reporter.render_csv(rows, columns))

    def run(self) -> int:
        handlers = {
            "lemma-n": self.run_lemma_n,
            "transform": self.run_transform,
            "convolve": self.run_convolve,
            "chars": self.run_chars,
            "recover": self.run_recover,
            "strip": self.run_strip,
            "window": self.run_window,
            "wordlen": self.run_wordlen,
        }
        self.app_logger.log_operation(self.args.subcommand, {"out": self.args.out, "seed": self.seed})
        return handlers[self.args.subcommand]()

    def run_lemma_n(self) -> int:
        """证书 JSON；--verify 时验证失败返回退出码 2"""
        sampling = self.config["sampling_config"]
        grid = self.args.grid or f"{sampling['lemma_grid_angles']}x{sampling['lemma_grid_radii']}"
        cfg = self.cli_config(grid=grid)
        cert = compute_N(_parse_number(self.args.m), float(self.args.eps))
        payload = cert.to_dict()
        payload.update({"verified": False, "grid_max_k": None})
        code = EXIT_OK
        if self.args.verify:
            start_time = time.time()
            try:
                report = verify_certificate(cert, cfg.grid[0], cfg.grid[1], parallel=cfg.parallel)
                payload.update({"verified": report.holds, "grid_max_k": report.max_k})
                if not report.holds:
                    self.app_logger.warning(f"证书 N={cert.N} 未通过网格验证，max_k={report.max_k}，见证点 {report.witness}")
                    code = EXIT_VERIFICATION_FAILED
            except NoEscapeWithinCapError as e:
                self.app_logger.log_error_with_context(e, {"m": cert.m, "eps": cert.eps})
                code = EXIT_VERIFICATION_FAILED
            self.app_logger.log_performance("证书网格验证", time.time() - start_time, {"grid": f"{cfg.grid[0]}x{cfg.grid[1]}"})
        self.emit_json(payload, cfg.output)
        return code

    def _sweep_character(self, f, zc: complex) -> GenChar:
        """扫描用的特征：z 落在第一个实因子上；纯离散群改用第一个 ℤ 因子上的 w = e^z"""
        group = f.group
        z = [0j] * group.real_rank
        w = [1 + 0j] * group.int_rank
        if group.real_rank:
            z[0] = zc
        elif group.int_rank:
            w[0] = cmath.exp(zc)
        else:
            raise InputProcessingError(f"群 {group.describe()} 没有可扫描的实因子或 ℤ 因子")
        return GenChar(group, tuple(z), tuple(w), (0,) * group.cyclic_rank)

    def run_transform(self) -> int:
        cfg = self.cli_config((self.args.function,), self.args.grid, self.args.re_range, self.args.im_range)
        f = self.reader.read_function(self.args.function)
        start_time = time.time()
        re_values, im_values = cfg.axis_values()
        rows = []
        for re in re_values:
            for im in im_values:
                value = gelfand_transform(f, self._sweep_character(f, complex(re, im)))
                rows.append({"re_z": float(re), "im_z": float(im), "re_val": value.real, "im_val": value.imag})
        self.app_logger.log_performance("变换扫描", time.time() - start_time, {"points": len(rows)})
        self.emit_rows(rows, ["re_z", "im_z", "re_val", "im_val"], cfg.output, "变换扫描")
        return EXIT_OK

    def run_convolve(self) -> int:
        f = self.reader.read_function(self.args.first)
        g = self.reader.read_function(self.args.second)
        self.emit_json(function_to_dict(convolve(f, g)), self.args.out)
        return EXIT_OK

    def run_chars(self) -> int:
        """每个特征一行：对偶余数以及各循环因子生成元处的取值"""
        orders = self.args.orders
        rows = []
        columns = [f"c{i + 1}" for i in range(len(orders))]
        for i in range(len(orders)):
            columns += [f"re_chi{i + 1}", f"im_chi{i + 1}"]
        for alpha in enumerate_characters(orders):
            row = {f"c{i + 1}": c for i, c in enumerate(alpha.dual_residues)}
            for i, (c, d) in enumerate(zip(alpha.dual_residues, alpha.group.cyclic_orders)):
                value = root_of_unity(c, d)
                row[f"re_chi{i + 1}"] = value.real
                row[f"im_chi{i + 1}"] = value.imag
            rows.append(row)
        self.emit_rows(rows, columns, self.args.out, "特征表")
        return EXIT_OK

    def run_recover(self) -> int:
        f = self.reader.read_function(self.args.function)
        rng = np.random.default_rng(self.seed)
        source = self.args.functional or self.args.hidden
        phi = self.reader.read_functional(source, f.group, rng)
        points = sample_grid(f.group, f.real_step, self.args.span)
        tolerances = self.config["tolerance_config"]
        try:
            probe_multiplicativity(phi, [f], tolerances["multiplicativity_tol"])
        except NotMultiplicativeError as e:
            self.app_logger.warning(str(e))
        rc = recover_character(phi, f, points, tolerances["denom_tol"])
        self.app_logger.info(f"恢复完成: {len(points)} 个采样点，同态缺陷 {rc.residual:.3e}")
        if self.args.fit:
            fitted = fit_parametric(rc, f.group, f.real_step, tolerances["fit_tol"])
            payload = character_to_dict(fitted)
            payload["residual"] = rc.residual
            self.emit_json(payload, self.args.out)
            return EXIT_OK
        rows = as_rows(rc)
        columns = [f"s{i + 1}" for i in range(len(points[0].coordinates()))] + ["re_alpha", "im_alpha"]
        self.emit_rows(rows, columns, self.args.out, "特征恢复")
        return EXIT_OK

    def run_strip(self) -> int:
        r = self.args.r
        re_range = self.args.re_range or f"{-r}:{r}"
        cfg = self.cli_config((), self.args.grid, re_range, self.args.im_range)
        if self.args.witness is not None:
            records = divergence_witness(self.args.witness, r)
            self.emit_rows(records, ["shift", "transform_abs", "norm", "ratio"], cfg.output, "发散见证")
            return EXIT_OK
        if not self.args.function:
            raise CliUsageError("strip 需要函数文件，或使用 --witness")
        f = self.reader.read_function(self.args.function)
        start_time = time.time()
        re_values, im_values = cfg.axis_values()
        rows = strip_sweep(f, r, [float(v) for v in re_values], [float(v) for v in im_values], cfg.parallel,
                           slack=cfg.tolerances["strip_slack"])
        self.app_logger.log_performance("带形扫描", time.time() - start_time, self.reporter.create_summary_statistics(rows))
        self.emit_rows(rows, ["re_z", "im_z", "abs_transform", "weighted_norm", "in_strip", "ok"], cfg.output, "带形扫描")
        return EXIT_OK

    def run_window(self) -> int:
        """W_{n,ε} 的外部与内部包含检查报告；失败只记录，不影响退出码"""
        n, eps = self.args.n, self.args.eps
        delta = self.args.delta if self.args.delta is not None else eps
        if self.args.count < 1:
            raise CliUsageError(f"--count 必须 ≥ 1: {self.args.count}")
        samples = self.config["sampling_config"]["hr_window_samples"]
        rng = np.random.default_rng(self.seed)
        start_time = time.time()
        outer = check_outer_containment(n, eps, self.args.count, rng, samples)
        inner = check_inner_containment(n, eps, delta, self.args.count, rng, samples)
        self.app_logger.log_performance("窗口包含检查", time.time() - start_time, {"count": self.args.count})
        self.emit_json({"delta": delta, "outer": outer.to_dict(), "inner": inner.to_dict()}, self.args.out)
        return EXIT_OK

    def run_wordlen(self) -> int:
        group = self.reader.parse_group(self.reader.load_json(self.args.group, "群"))
        halfwidths = tuple(float(u) for u in self.args.box.split(",") if u.strip())
        box = GeneratingBox(halfwidths)
        data = self.reader.load_json(self.args.element, "群元素")
        t = make_element(group, tuple(float(x) for x in data.get("real", [0.0] * group.real_rank)),
                         tuple(int(k) for k in data.get("ints", [0] * group.int_rank)),
                         tuple(int(r) for r in data.get("residues", [0] * group.cyclic_rank)))
        payload = {"element": list(t.coordinates()), "word_length": word_length(t, box)}
        if self.args.m is not None:
            spec = TmSpec(self.args.m, box, self.config["sampling_config"]["tm_sample_density"])
            alpha = self.reader.read_character(self.args.char or {}, group)
            lo, hi, value = growth_bounds(alpha, t, spec)
            payload.update({"lower_bound": lo, "upper_bound": hi, "abs_value": value,
                            "value": [evaluate(alpha, t).real, evaluate(alpha, t).imag]})
        self.emit_json(payload, self.args.out)
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行入口

    Returns:
        退出码：0 成功；1 用法/输入/输出错误；2 证书验证失败
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        return CliApp(args).run()
    except SystemExit as e:
        return int(e.code or 0)
    except CliUsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except USAGE_ERRORS as e:
        sys.stderr.write(f"错误: {e}\n")
        return EXIT_USAGE
