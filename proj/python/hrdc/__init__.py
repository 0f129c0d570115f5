"""Compressed inverted indexes for highly repetitive document collections."""

from ._hrdc import (
    Codec,
    Error,
    Index,
    Scenario,
    TextStore,
    decode,
    decode_stream,
    encode,
    encode_stream,
    from_gaps,
    gen_corpus,
    method_names,
    rice_param,
    to_gaps,
)

__all__ = [
    "Codec",
    "Error",
    "Index",
    "Scenario",
    "TextStore",
    "decode",
    "decode_stream",
    "encode",
    "encode_stream",
    "from_gaps",
    "gen_corpus",
    "method_names",
    "rice_param",
    "to_gaps",
]
