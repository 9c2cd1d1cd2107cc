"""Example problems, error tables, diagnostics and the command line."""
from .examples import EXAMPLE_FILES, example_problem
from .tables import ErrorRow, ErrorTable, emit_csv, format_csv, run_example, table_for

__all__ = ["EXAMPLE_FILES", "example_problem", "ErrorRow", "ErrorTable", "emit_csv", "format_csv", "run_example", "table_for"]
