"""
Output helper module for writing result tables

Every command builds a pandas DataFrame and hands it here together with a
title and a summary. Markdown is meant for people, csv and json for
scripts, xlsx for spreadsheets. csv and json output is byte-for-byte
reproducible.
"""
import json
import logging
import sys
from typing import Any, Dict, Optional

import numpy as np
import openpyxl
import pandas as pd
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from divdeg.exceptions import ArgumentError

logger = logging.getLogger(__name__)

FORMATS = ('markdown', 'csv', 'json', 'xlsx')

# Define consistent styles
HEADER_FONT = Font(name='Arial', size=12, bold=True, color='FFFFFF')
HEADER_FILL = PatternFill(start_color='366092', end_color='366092', fill_type='solid')
HEADER_ALIGNMENT = Alignment(horizontal='center', vertical='center', wrap_text=True)
BORDER = Border(
    left=Side(style='thin', color='000000'),
    right=Side(style='thin', color='000000'),
    top=Side(style='thin', color='000000'),
    bottom=Side(style='thin', color='000000')
)


def plain(value):
    """Convert numpy scalars and tuples into JSON-friendly Python values."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (tuple, list)):
        return [plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    return value


def make_frame(rows, columns) -> pd.DataFrame:
    """Build a frame that keeps ints as ints and empty cells as None."""
    return pd.DataFrame(rows, columns=columns, dtype=object)


def to_markdown(frame: pd.DataFrame, title: Optional[str] = None, summary: Optional[Dict[str, Any]] = None) -> str:
    parts = []
    if title:
        parts.append(f"## {title}\n")
    parts.append(frame.to_markdown(index=False))
    if summary:
        parts.append("")
        for key, value in summary.items():
            if isinstance(value, (list, tuple)):
                value = ', '.join(str(v) for v in value) or '-'
            parts.append(f"- **{key}**: {value}")
    return "\n".join(parts) + "\n"


def to_csv(frame: pd.DataFrame, summary: Optional[Dict[str, Any]] = None) -> str:
    """The table, then a blank line and a key,value block when there is a summary."""
    text = frame.to_csv(index=False, lineterminator='\n')
    if summary:
        block = make_frame([(key, _csv_value(value)) for key, value in summary.items()], ['key', 'value'])
        text += "\n" + block.to_csv(index=False, lineterminator='\n')
    return text


def _csv_value(value):
    value = plain(value)
    if isinstance(value, list):
        return ';'.join(str(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return value


def to_json(frame: pd.DataFrame, title: Optional[str] = None, summary: Optional[Dict[str, Any]] = None) -> str:
    document = {
        'title': title,
        'columns': [str(c) for c in frame.columns],
        'rows': [[plain(v) for v in row] for row in frame.itertuples(index=False, name=None)],
        'summary': plain(summary or {}),
    }
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def apply_formatting(workbook):
    """Apply consistent formatting to all sheets in the workbook"""
    for sheet in workbook.worksheets:
        for cell in sheet[1]:
            cell.font = HEADER_FONT
            cell.fill = HEADER_FILL
            cell.alignment = HEADER_ALIGNMENT
            cell.border = BORDER

        # Auto-adjust column widths based on content
        for column in sheet.columns:
            max_length = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
            sheet.column_dimensions[get_column_letter(column[0].column)].width = min(max_length + 2, 40)

        for row in sheet.iter_rows(min_row=2):
            for cell in row:
                cell.border = BORDER


def _cell(value):
    value = plain(value)
    return json.dumps(value) if isinstance(value, (list, dict)) else value


def write_xlsx(frame: pd.DataFrame, path: str, title: Optional[str] = None,
               summary: Optional[Dict[str, Any]] = None):
    workbook = openpyxl.Workbook()
    sheet = workbook.active
    sheet.title = 'Results'
    sheet.append([str(c) for c in frame.columns])
    for row in frame.itertuples(index=False, name=None):
        sheet.append([_cell(v) for v in row])

    info = workbook.create_sheet('Summary')
    info.append(['Information', 'Value'])
    if title:
        info.append(['Title', title])
    for key, value in (summary or {}).items():
        info.append([key, _cell(value)])

    apply_formatting(workbook)
    workbook.save(path)
    logger.info(f"Wrote {len(frame)} rows to {path}")


def render_frame(frame: pd.DataFrame, fmt: str = 'markdown', destination=None,
                 title: Optional[str] = None, summary: Optional[Dict[str, Any]] = None):
    """
    Write a result table.

    Args:
        frame: The table
        fmt: markdown, csv, json or xlsx
        destination: A path, a writable text stream, or None for stdout
        title: Table title (markdown heading, json field, xlsx summary)
        summary: Extra key/value results, below the table in every format

    Raises:
        ArgumentError: Unknown format, or xlsx without a file destination
    """
    if fmt not in FORMATS:
        raise ArgumentError(f"unknown output format '{fmt}' (choose from {', '.join(FORMATS)})")

    if fmt == 'xlsx':
        if destination is None or hasattr(destination, 'write'):
            raise ArgumentError("xlsx output needs a file destination (--output)")
        write_xlsx(frame, str(destination), title, summary)
        return

    if fmt == 'markdown':
        text = to_markdown(frame, title, summary)
    elif fmt == 'csv':
        text = to_csv(frame, summary)
    else:
        text = to_json(frame, title, summary)

    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, 'write'):
        destination.write(text)
    else:
        with open(destination, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        logger.info(f"Wrote {fmt} output to {destination}")
