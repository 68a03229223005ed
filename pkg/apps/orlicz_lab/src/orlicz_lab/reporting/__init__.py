from orlicz_lab.reporting.serialize import (
    CSV_COLUMNS,
    dumps,
    format_number,
    render_csv,
    to_jsonable,
    write_csv,
    write_json,
)

__all__ = [
    "CSV_COLUMNS",
    "dumps",
    "format_number",
    "render_csv",
    "to_jsonable",
    "write_csv",
    "write_json",
]
