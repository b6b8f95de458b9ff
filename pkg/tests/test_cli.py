"""
命令行前端测试
"""
import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest.mock import patch

import openpyxl
import pandas as pd

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.data_models import VerificationReport
from ui.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED, CliConfig, CliUsageError, main


BOX_FUNCTION = {
    "group": {"real_rank": 1},
    "real_step": [0.25],
    "real_offset": [-2],
    "extents": [3],
    "values": [[1, 0], [1, 0], [1, 0], [1, 0]],
}

DELTA_ON_INTEGERS = {
    "group": {"int_rank": 1},
    "extents": [0],
    "values": [[1, 0]],
}


class TestCli(unittest.TestCase):
    """命令行测试类"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.config_path = self.write_json("config.json", {"logging_config": {"level": "ERROR"}})
        self.box_path = self.write_json("box.json", BOX_FUNCTION)
        self.delta_path = self.write_json("delta.json", DELTA_ON_INTEGERS)

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def write_json(self, name, data):
        path = os.path.join(self.temp_dir, name)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(data, handle)
        return path

    def run_cli(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main(["--config", self.config_path, *argv])
        return code, stdout.getvalue(), stderr.getvalue()

    def read_csv(self, text):
        return pd.read_csv(io.StringIO(text))

    def test_lemma_n_verified(self):
        """lemma-n 2 0.4 --verify → N=3、verified=true、退出码 0"""
        code, out, _ = self.run_cli("lemma-n", "2", "0.4", "--verify")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["N"], 3)
        self.assertTrue(payload["verified"])
        self.assertLessEqual(payload["grid_max_k"], 3)

    def test_lemma_n_without_verify(self):
        code, out, _ = self.run_cli("lemma-n", "2", "0.4")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertFalse(payload["verified"])
        self.assertIsNone(payload["grid_max_k"])

    def test_lemma_n_usage_errors(self):
        """三种用法错误返回 1 并在标准错误流给出原因"""
        code, out, err = self.run_cli("lemma-n", "2", "0.6")
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("eps must be < 1/m", err)
        self.assertEqual(out, "")
        code, _, err = self.run_cli("lemma-n", "1", "0.1")
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("m must exceed 1", err)
        code, _, err = self.run_cli("lemma-n", "two", "0.1")
        self.assertEqual(code, EXIT_USAGE)
        self.assertTrue(err)

    def test_lemma_n_bad_grid(self):
        """验证网格点数小于 2 属于用法错误"""
        code, _, _ = self.run_cli("lemma-n", "2", "0.4", "--verify", "--grid", "1x1")
        self.assertEqual(code, EXIT_USAGE)

    def test_lemma_n_verification_failure(self):
        """网格验证不通过时退出码为 2，证书仍然输出"""
        failed = VerificationReport(holds=False, max_k=5, witness=1.4 + 0j)
        with patch("ui.cli.verify_certificate", return_value=failed):
            code, out, _ = self.run_cli("lemma-n", "2", "0.4", "--verify")
        self.assertEqual(code, EXIT_VERIFICATION_FAILED)
        payload = json.loads(out)
        self.assertFalse(payload["verified"])
        self.assertEqual(payload["grid_max_k"], 5)

    def test_missing_subcommand(self):
        code, _, err = self.run_cli()
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("lcachar", err)

    def test_transform_grid(self):
        """3×3 网格得到 9 行，中心行等于 ∫f"""
        code, out, _ = self.run_cli("transform", self.box_path, "--grid", "3x3")
        self.assertEqual(code, EXIT_OK)
        table = self.read_csv(out)
        self.assertEqual(list(table.columns), ["re_z", "im_z", "re_val", "im_val"])
        self.assertEqual(len(table), 9)
        center = table[(table.re_z == 0) & (table.im_z == 0)].iloc[0]
        self.assertAlmostEqual(center.re_val, 1.0)
        self.assertAlmostEqual(center.im_val, 0.0)

    def test_transform_deterministic_files(self):
        """相同输入两次写出的文件逐字节相同"""
        first = os.path.join(self.temp_dir, "a.csv")
        second = os.path.join(self.temp_dir, "b.csv")
        self.assertEqual(self.run_cli("transform", self.box_path, "--seed", "0", "--out", first)[0], EXIT_OK)
        self.assertEqual(self.run_cli("--seed", "0", "transform", self.box_path, "--out", second)[0], EXIT_OK)
        with open(first, 'rb') as a, open(second, 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_transform_empty_function_file(self):
        empty = os.path.join(self.temp_dir, "empty.json")
        open(empty, 'w').close()
        code, _, err = self.run_cli("transform", empty)
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("文件为空", err)

    def test_unwritable_output(self):
        """输出目录不存在时返回 1 且不留下文件"""
        target = os.path.join(self.temp_dir, "missing", "out.csv")
        code, _, _ = self.run_cli("transform", self.box_path, "--out", target)
        self.assertEqual(code, EXIT_USAGE)
        self.assertFalse(os.path.exists(target))

    def test_convolve(self):
        code, out, _ = self.run_cli("convolve", self.box_path, self.box_path)
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["extents"], [6])
        self.assertEqual(payload["real_offset"], [-4])
        self.assertAlmostEqual(payload["values"][3][0], 1.0)

    def test_chars(self):
        """chars 4 → 4 行，生成元处取值 1, i, −1, −i"""
        code, out, _ = self.run_cli("chars", "4")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out.splitlines(), [
            "c1,re_chi1,im_chi1",
            "0,1.0,0.0",
            "1,0.0,1.0",
            "2,-1.0,0.0",
            "3,0.0,-1.0",
        ])

    def test_chars_deterministic(self):
        first = self.run_cli("chars", "2", "3")
        second = self.run_cli("chars", "2", "3")
        self.assertEqual(first[1], second[1])
        self.assertEqual(len(first[1].splitlines()), 7)

    def test_chars_bad_order(self):
        self.assertEqual(self.run_cli("chars", "1")[0], EXIT_USAGE)

    def test_recover_hidden(self):
        """--hidden w=2 给出 2 的幂"""
        code, out, _ = self.run_cli("recover", self.delta_path, "--hidden", '{"w": [[2, 0]]}')
        self.assertEqual(code, EXIT_OK)
        table = self.read_csv(out)
        self.assertEqual(list(table.s1), [-2, -1, 0, 1, 2])
        for k, value in zip(table.s1, table.re_alpha):
            self.assertAlmostEqual(value, 2.0 ** k)
        self.assertTrue((table.im_alpha.abs() < 1e-12).all())

    def test_recover_noisy_is_seeded(self):
        functional = '{"kind": "noisy_gelfand", "char": {"w": [[2, 0]]}, "noise": 0.01}'
        first = self.run_cli("recover", self.delta_path, "--functional", functional, "--seed", "3")
        second = self.run_cli("recover", self.delta_path, "--functional", functional, "--seed", "3")
        self.assertEqual(first[0], EXIT_OK)
        self.assertEqual(first[1], second[1])

    def test_recover_fit(self):
        """--fit 输出拟合参数，可作为 --hidden 读回"""
        code, out, _ = self.run_cli("recover", self.delta_path, "--hidden", '{"w": [[2, 0]]}', "--fit")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["z"], [])
        self.assertEqual(payload["dual_residues"], [])
        self.assertAlmostEqual(payload["w"][0][0], 2.0)
        self.assertAlmostEqual(payload["w"][0][1], 0.0)
        self.assertLess(payload["residual"], 1e-12)
        again = self.run_cli("recover", self.delta_path, "--hidden", out, "--fit")
        self.assertEqual(again[1], out)

    def test_recover_noisy_fit_fails(self):
        """含噪泛函的拟合偏差超过 fit_tol 时返回 1"""
        functional = '{"kind": "noisy_gelfand", "char": {"w": [[2, 0]]}, "noise": 0.1}'
        code, out, err = self.run_cli("recover", self.delta_path, "--functional", functional, "--fit")
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(out, "")
        self.assertTrue(err)

    def test_window(self):
        """n=1、ε=0.5 时外部与内部包含都成立"""
        code, out, _ = self.run_cli("window", "1", "0.5", "--count", "100")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["delta"], 0.5)
        self.assertEqual(payload["outer"]["samples"], 100)
        self.assertEqual(payload["outer"]["failures"], 0)
        self.assertTrue(payload["inner"]["holds"])
        self.assertIsNone(payload["inner"]["witness"])

    def test_window_bad_eps(self):
        self.assertEqual(self.run_cli("window", "1", "1.5")[0], EXIT_USAGE)

    def test_strip_sweep(self):
        """带内的行全部 ok=true"""
        code, out, _ = self.run_cli("strip", self.box_path, "--r", "1", "--grid", "5x3", "--re-range=-2:2")
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "re_z,im_z,abs_transform,weighted_norm,in_strip,ok")
        self.assertEqual(len(lines), 16)
        for line in lines[1:]:
            fields = line.split(",")
            if fields[4] == "true":
                self.assertEqual(fields[5], "true")

    def test_strip_witness(self):
        code, out, _ = self.run_cli("strip", "--r", "1", "--witness", "1.5")
        self.assertEqual(code, EXIT_OK)
        table = self.read_csv(out)
        self.assertEqual(len(table), 5)
        self.assertGreaterEqual(table.ratio.iloc[-1] / table.ratio.iloc[0], 10)

    def test_strip_requires_function(self):
        self.assertEqual(self.run_cli("strip", "--r", "1")[0], EXIT_USAGE)

    def test_wordlen(self):
        code, out, _ = self.run_cli("wordlen", "--group", '{"real_rank": 1, "int_rank": 1}', "--box", "0.5",
                                    "--element", '{"real": [1.2], "ints": [2]}', "--m", "2")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        self.assertEqual(payload["word_length"], 3)
        self.assertAlmostEqual(payload["lower_bound"], 0.125)
        self.assertAlmostEqual(payload["upper_bound"], 3.375)
        self.assertAlmostEqual(payload["abs_value"], 1.0)

    def test_xlsx_output(self):
        target = os.path.join(self.temp_dir, "chars.xlsx")
        code, out, _ = self.run_cli("chars", "3", "--out", target)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "")
        ws = openpyxl.load_workbook(target).active
        self.assertEqual([ws.cell(row=4, column=c).value for c in range(1, 4)], ["c1", "re_chi1", "im_chi1"])
        self.assertEqual(ws.cell(row=5, column=1).value, 0)

    def test_missing_config(self):
        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            code = main(["--config", os.path.join(self.temp_dir, "nope.json"), "chars", "2"])
        self.assertEqual(code, EXIT_USAGE)


class TestCliConfig(unittest.TestCase):
    """CliConfig 校验测试类"""

    def test_grid_counts(self):
        with self.assertRaises(CliUsageError):
            CliConfig("transform", grid=(1, 3))

    def test_negative_tolerance(self):
        with self.assertRaises(CliUsageError):
            CliConfig("recover", tolerances={"denom_tol": -1.0})

    def test_axis_values(self):
        re_values, im_values = CliConfig("transform", grid=(3, 2), re_range=(-1, 1), im_range=(0, 2)).axis_values()
        self.assertEqual(list(re_values), [-1.0, 0.0, 1.0])
        self.assertEqual(list(im_values), [0.0, 2.0])


if __name__ == '__main__':
    unittest.main()
