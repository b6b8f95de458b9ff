"""
报告生成器
负责把扫描结果写成 CSV/JSON，或带样式表头的 Excel 工作簿；输出顺序与浮点格式固定，
相同输入得到逐字节相同的文件
"""
import json
from datetime import datetime
from typing import Any, Dict, Optional, Sequence

import numpy as np
import openpyxl
import pandas as pd
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from models.data_models import CcFunction, GenChar
from services.file_manager import FileManager


def format_value(value: Any, float_digits: int = 17) -> str:
    """布尔写作 true/false；浮点取最短往返表示，位数超过 float_digits 时按有效数字截断"""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        text = repr(float(value))
        if float_digits < 17 and sum(ch.isdigit() for ch in text.split("e")[0]) > float_digits:
            text = f"{value:.{float_digits}g}"
        return text
    return str(value)


def function_to_dict(f: CcFunction) -> Dict:
    """函数 JSON（extents 为支撑跨度，values 按行优先展开为 [re, im]）"""
    return {
        "group": {
            "real_rank": f.group.real_rank,
            "int_rank": f.group.int_rank,
            "cyclic_orders": list(f.group.cyclic_orders),
        },
        "real_step": list(f.real_step),
        "real_offset": list(f.real_offset),
        "int_offset": list(f.int_offset),
        "extents": list(f.extents),
        "values": [[float(v.real), float(v.imag)] for v in f.values.ravel()],
    }


def character_to_dict(alpha: GenChar) -> Dict:
    """特征 JSON，键与输入格式一致，可直接作为 --hidden 读回"""
    return {
        "z": [[v.real, v.imag] for v in alpha.z],
        "w": [[v.real, v.imag] for v in alpha.w],
        "dual_residues": list(alpha.dual_residues),
    }


class ReportGenerator:
    """CSV/JSON/Excel 报告生成器"""

    def __init__(self, float_digits: int = 17):
        self.float_digits = float_digits
        self.report_title = "LCA 广义特征扫描报告"
        self.file_manager = FileManager()

    def render_csv(self, rows: Sequence[Dict], columns: Sequence[str]) -> str:
        """按列顺序渲染 CSV 文本（LF 换行）"""
        table = pd.DataFrame(
            [[format_value(row[col], self.float_digits) for col in columns] for row in rows],
            columns=list(columns),
            dtype=object,
        )
        return table.to_csv(index=False, lineterminator="\n")

    def render_json(self, data: Any) -> str:
        return json.dumps(data, ensure_ascii=False, indent=2) + "\n"

    def write_csv(self, rows: Sequence[Dict], columns: Sequence[str], output_path: str) -> str:
        """
        原子写入 CSV

        Returns:
            str: 实际保存的文件路径

        Raises:
            FileManagerError: 路径无效或写入失败
        """
        return self.file_manager.write_text(output_path, self.render_csv(rows, columns))

    def write_json(self, data: Any, output_path: str) -> str:
        return self.file_manager.write_text(output_path, self.render_json(data))

    def write_rows(self, rows: Sequence[Dict], columns: Sequence[str], output_path: str,
                   sheet_title: Optional[str] = None) -> str:
        """按扩展名选择 CSV 或 Excel"""
        if output_path.lower().endswith(".xlsx"):
            return self.write_xlsx(rows, columns, output_path, sheet_title or "扫描结果")
        return self.write_csv(rows, columns, output_path)

    def write_xlsx(self, rows: Sequence[Dict], columns: Sequence[str], output_path: str,
                   sheet_title: str = "扫描结果") -> str:
        """
        生成带标题与样式表头的 Excel 工作簿

        Raises:
            FileManagerError: 路径无效或写入失败
        """
        generated_time = datetime.now()

        def writer(tmp_path: str) -> None:
            wb = openpyxl.Workbook()
            ws = wb.active
            ws.title = sheet_title[:31]
            self._add_report_header(ws, columns, generated_time)
            self._add_data_table(ws, rows, columns)
            self._apply_styles(ws, len(rows), len(columns))
            wb.save(tmp_path)

        return self.file_manager.atomic_write(output_path, writer)

    def _add_report_header(self, worksheet, columns: Sequence[str], generated_time: datetime):
        """添加报告头部信息"""
        last = get_column_letter(max(1, len(columns)))
        worksheet['A1'] = self.report_title
        worksheet.merge_cells(f'A1:{last}1')
        worksheet['A2'] = f"生成时间: {generated_time.strftime('%Y-%m-%d %H:%M:%S')}"
        worksheet.merge_cells(f'A2:{last}2')
        for col, header in enumerate(columns, 1):
            worksheet.cell(row=4, column=col, value=header)

    def _add_data_table(self, worksheet, rows: Sequence[Dict], columns: Sequence[str]):
        """添加数据表格，布尔值写作 true/false，数值保持数值类型"""
        for row_idx, row in enumerate(rows, 5):
            for col_idx, col in enumerate(columns, 1):
                value = row[col]
                if isinstance(value, (bool, np.bool_)):
                    value = format_value(value)
                worksheet.cell(row=row_idx, column=col_idx, value=value)

    def _apply_styles(self, worksheet, data_rows: int, n_columns: int):
        """应用样式格式"""
        title_cell = worksheet['A1']
        title_cell.font = Font(size=16, bold=True)
        title_cell.alignment = Alignment(horizontal='center', vertical='center')

        time_cell = worksheet['A2']
        time_cell.font = Font(size=10)
        time_cell.alignment = Alignment(horizontal='center')

        header_fill = PatternFill(start_color='366092', end_color='366092', fill_type='solid')
        header_font = Font(size=11, bold=True, color='FFFFFF')
        border = Border(left=Side(style='thin'), right=Side(style='thin'),
                        top=Side(style='thin'), bottom=Side(style='thin'))

        for col in range(1, n_columns + 1):
            cell = worksheet.cell(row=4, column=col)
            cell.fill = header_fill
            cell.font = header_font
            cell.alignment = Alignment(horizontal='center', vertical='center')
            worksheet.column_dimensions[get_column_letter(col)].width = 24

        for row in range(4, 5 + data_rows):
            for col in range(1, n_columns + 1):
                worksheet.cell(row=row, column=col).border = border

    def create_summary_statistics(self, rows: Sequence[Dict]) -> Dict:
        """带形扫描的汇总统计"""
        in_strip = [r for r in rows if r.get("in_strip")]
        return {
            "total_points": len(rows),
            "in_strip_points": len(in_strip),
            "in_strip_violations": len([r for r in in_strip if not r.get("ok")]),
        }
