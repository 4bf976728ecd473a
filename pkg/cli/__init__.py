"""
CLI Package
"""

from .commands import build_parser, main, run
from .report_format import companion_dot, format_table, rows_json, write_dot

__all__ = ['build_parser', 'main', 'run', 'companion_dot', 'format_table', 'rows_json', 'write_dot']
