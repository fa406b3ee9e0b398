"""Spherical indexing: zones, HTM covers, region algebra and a zone pyramid."""

from ._skysearch import (
    Error,
    GeometryError,
    IngestError,
    ParseError,
    PyramidIndex,
    QueryError,
    Region,
    SnapshotError,
    ZoneTable,
    arc_distance_deg,
    htm_cover,
    htm_id,
    ingest_csv_text,
    neighbors,
    sky_to_vec,
    vec_to_sky,
)

__all__ = [
    "Error",
    "GeometryError",
    "IngestError",
    "ParseError",
    "PyramidIndex",
    "QueryError",
    "Region",
    "SnapshotError",
    "ZoneTable",
    "arc_distance_deg",
    "htm_cover",
    "htm_id",
    "ingest_csv_text",
    "neighbors",
    "sky_to_vec",
    "vec_to_sky",
]
