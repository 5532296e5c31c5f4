"""File codecs: CSV for paths and tables, JSON for specs, certificates and reports."""

from .csv_codec import (
    REAL_FORMAT,
    read_ensemble,
    read_path,
    write_ensemble,
    write_path,
    write_records,
    write_table,
)
from .json_codec import (
    SCHEMA,
    PathcalcJSONEncoder,
    decode_functional,
    decode_integrand,
    decode_sde_spec,
    decode_strategy,
    dumps,
    read_certificate,
    read_document,
    read_integrand,
    read_sde_spec,
    write_certificate,
    write_document,
)

__all__ = [
    "REAL_FORMAT",
    "SCHEMA",
    "PathcalcJSONEncoder",
    "decode_functional",
    "decode_integrand",
    "decode_sde_spec",
    "decode_strategy",
    "dumps",
    "read_certificate",
    "read_document",
    "read_ensemble",
    "read_integrand",
    "read_path",
    "read_sde_spec",
    "write_certificate",
    "write_document",
    "write_ensemble",
    "write_path",
    "write_records",
    "write_table",
]
