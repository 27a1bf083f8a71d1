"""
CSV output for experiment records, spectra, matchings and point sets
"""
import logging
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from app import __version__
from app.errors import EmptyRecordsError, ExportError
from app.models import Matching, PointSet, Spectrum
from app.schemas import RecordBase
from app.services.matching import matching_distances

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def records_frame(records: Iterable) -> pd.DataFrame:
    """One row per record; dict-valued fields spread into one column per key"""
    rows = [r.to_row() if isinstance(r, RecordBase) else dict(r) for r in records]
    if not rows:
        raise EmptyRecordsError("no records to export")
    return pd.DataFrame(rows)


def _metadata_lines(metadata: Optional[Dict]) -> List[str]:
    lines = [f"# tool_version: {__version__}"]
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}: {value}")
    return lines


def write_frame(df: pd.DataFrame, path: str, metadata: Optional[Dict] = None) -> None:
    """'#' metadata lines, then the header and rows with 17 significant digits"""
    try:
        with open(path, "w", newline="") as fh:
            for line in _metadata_lines(metadata):
                fh.write(line + "\n")
            df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise ExportError(path, e) from e
    logger.info(f"wrote {len(df)} rows to {path}")


def emit_csv(records: Iterable, path: str, metadata: Optional[Dict] = None) -> None:
    """Write records to `path`; metadata should carry the config echo and master seed"""
    write_frame(records_frame(records), path, metadata)


def read_csv(path: str) -> pd.DataFrame:
    """Parse a file written by emit_csv; floats come back bit for bit"""
    return pd.read_csv(path, comment="#", float_precision="round_trip")


def read_metadata(path: str) -> Dict[str, str]:
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
    return meta


def write_spectrum_csv(spectrum: Spectrum, path: str, metadata: Optional[Dict] = None) -> None:
    df = pd.DataFrame({"rank": np.arange(1, spectrum.n + 1), "eigenvalue": spectrum.values})
    write_frame(df, path, {"source": spectrum.source, "connected": spectrum.connected, **(metadata or {})})


def write_matching_csv(X: PointSet, D: PointSet, matching: Matching, path: str, metadata: Optional[Dict] = None) -> None:
    df = pd.DataFrame(
        {
            "x_index": np.arange(X.n),
            "d_index": matching.forward,
            "distance": matching_distances(X, D, matching.forward),
        }
    )
    write_frame(df, path, {"bottleneck": repr(matching.bottleneck), **(metadata or {})})


def write_points_csv(points: PointSet, path: str, metadata: Optional[Dict] = None) -> None:
    df = pd.DataFrame(points.coords, columns=[f"x{i}" for i in range(points.dim)])
    write_frame(df, path, {"kind": points.kind, "seed": points.seed, "side": points.side, **(metadata or {})})
