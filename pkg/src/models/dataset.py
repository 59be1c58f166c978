"""
Datasets: sampled locations, covariates and responses.

A Dataset stores the response on one of two scales:

    raw  - the multiplicative-model measurement z (stored as |z| > 0, with the
           original orientation kept in ``sign``)
    log  - the log-transformed response y = log z (additive-form model)

Two text formats are supported:

    CSV  - header ``s1,s2,x1..xk,response``
    XYZ  - three whitespace-separated columns ``x y z`` per line (point clouds);
           x and y serve both as location and as covariates
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from models.errors import DataError, ScaleMismatch, SignChange

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ResponseScale(str, Enum):
    RAW = "raw"
    LOG = "log"


@dataclass(frozen=True)
class Dataset:
    """Immutable container for one spatial regression sample.

    Attributes:
        locations: n x d array of sampling coordinates s_i
        covariates: n x k array, row i = x(s_i)
        response: length-n response vector (|z| for raw, y for log)
        scale: ResponseScale of ``response``
        sign: +1 or -1, orientation of the original raw measurements
    """

    locations: np.ndarray
    covariates: np.ndarray
    response: np.ndarray
    scale: ResponseScale = ResponseScale.LOG
    sign: int = field(default=1)

    def __post_init__(self):
        locations = np.atleast_2d(np.array(self.locations, dtype=float))
        covariates = np.array(self.covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates.reshape(-1, 1)
        response = np.array(self.response, dtype=float).reshape(-1)
        n = response.shape[0]

        if n < 1:
            raise DataError("Dataset must contain at least one observation")
        if locations.shape[0] != n or covariates.shape[0] != n:
            raise DataError(
                f"Row count mismatch: locations={locations.shape[0]}, "
                f"covariates={covariates.shape[0]}, response={n}"
            )
        if not (np.all(np.isfinite(response)) and np.all(np.isfinite(covariates))):
            raise DataError("Dataset contains non-finite values")

        scale = ResponseScale(self.scale)
        if scale is ResponseScale.RAW and np.any(response <= 0):
            row = int(np.flatnonzero(response <= 0)[0])
            raise DataError(
                f"Raw-scale responses must be strictly positive (row {row} = {response[row]})"
            )
        if self.sign not in (1, -1):
            raise DataError(f"sign must be +1 or -1, got {self.sign}")

        for array in (locations, covariates, response):
            array.setflags(write=False)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "covariates", covariates)
        object.__setattr__(self, "response", response)
        object.__setattr__(self, "scale", scale)

    @property
    def n(self) -> int:
        return self.response.shape[0]

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[1]

    def log_scale(self) -> "Dataset":
        """Return the log-scale version y = log(z) of a raw dataset."""
        if self.scale is ResponseScale.LOG:
            return self
        return Dataset(
            locations=self.locations,
            covariates=self.covariates,
            response=np.log(self.response),
            scale=ResponseScale.LOG,
            sign=self.sign,
        )

    def require_scale(self, scale: ResponseScale) -> None:
        if self.scale is not ResponseScale(scale):
            raise ScaleMismatch(
                f"Method needs a {ResponseScale(scale).value}-scale response, "
                f"dataset is {self.scale.value}-scale"
            )

    def with_covariates(self, covariates: np.ndarray) -> "Dataset":
        """Return a copy sharing locations and response with new covariates."""
        return Dataset(
            locations=self.locations,
            covariates=covariates,
            response=self.response,
            scale=self.scale,
            sign=self.sign,
        )


def from_signed_measurements(
    locations: np.ndarray,
    covariates: np.ndarray,
    z: np.ndarray,
) -> Dataset:
    """Build a raw-scale Dataset from measurements that share one sign.

    Raises:
        DataError: any measurement is exactly zero
        SignChange: measurements have mixed signs
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    if np.any(z == 0):
        row = int(np.flatnonzero(z == 0)[0])
        raise DataError(f"Positivity violated: response is zero at row {row}")
    positive = z > 0
    if positive.all():
        sign = 1
    elif (~positive).all():
        sign = -1
    else:
        raise SignChange(
            f"Responses change sign ({int(positive.sum())} positive, "
            f"{int((~positive).sum())} negative)"
        )
    return Dataset(
        locations=locations,
        covariates=covariates,
        response=np.abs(z),
        scale=ResponseScale.RAW,
        sign=sign,
    )


def load_csv(path: PathLike, scale: Union[ResponseScale, str] = ResponseScale.RAW) -> Dataset:
    """Load a Dataset from CSV with header ``s1,s2,x1..xk,response``.

    Raw-scale files may hold all-negative responses; they are stored as |z|
    with ``sign = -1``.

    Raises:
        FileNotFoundError: path does not exist
        DataError: header or values are malformed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset file not found: {path}")

    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Could not parse dataset CSV {path}: {e}") from e

    columns = [str(c).strip() for c in frame.columns]
    location_columns = [c for c in columns if c.startswith("s")]
    covariate_columns = [c for c in columns if c.startswith("x")]
    if "response" not in columns or not location_columns or not covariate_columns:
        raise DataError(
            f"Dataset CSV {path} must have header s1,s2,x1..xk,response (got {','.join(columns)})"
        )
    frame.columns = columns

    try:
        locations = frame[location_columns].to_numpy(dtype=float)
        covariates = frame[covariate_columns].to_numpy(dtype=float)
        response = frame["response"].to_numpy(dtype=float)
    except ValueError as e:
        raise DataError(f"Non-numeric values in dataset CSV {path}: {e}") from e

    scale = ResponseScale(scale)
    logger.info(f"Loaded {len(response)} rows with {len(covariate_columns)} covariates from {path}")
    if scale is ResponseScale.RAW:
        return from_signed_measurements(locations, covariates, response)
    return Dataset(locations, covariates, response, scale=ResponseScale.LOG)


def save_csv(data: Dataset, path: PathLike) -> Path:
    """Write a Dataset in the ``s1,s2,x1..xk,response`` CSV format.

    Raw-scale responses are written with their original sign.
    """
    path = Path(path)
    columns = {f"s{i + 1}": data.locations[:, i] for i in range(data.locations.shape[1])}
    columns.update({f"x{i + 1}": data.covariates[:, i] for i in range(data.n_covariates)})
    response = data.response * data.sign if data.scale is ResponseScale.RAW else data.response
    columns["response"] = response
    pd.DataFrame(columns).to_csv(path, index=False, float_format="%.17g")
    logger.debug(f"Wrote {data.n} rows to {path}")
    return path


def load_xyz(path: PathLike) -> Dataset:
    """Load a point cloud of whitespace-separated ``x y z`` lines.

    Locations and covariates are both the (x, y) columns; the response is the
    raw measurement z (sign-normalized).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Point cloud file not found: {path}")
    try:
        frame = pd.read_csv(path, sep=r"\s+", header=None, comment="#")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Could not parse point cloud {path}: {e}") from e
    if frame.shape[1] != 3:
        raise DataError(f"Point cloud {path} must have exactly 3 columns, found {frame.shape[1]}")
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as e:
        raise DataError(f"Non-numeric values in point cloud {path}: {e}") from e

    coords = values[:, :2]
    logger.info(f"Loaded point cloud with {len(values)} points from {path}")
    return from_signed_measurements(coords, coords, values[:, 2])


def save_xyz(data: Dataset, path: PathLike) -> Path:
    """Write a raw-scale Dataset as an ``x y z`` point cloud (signed z)."""
    data.require_scale(ResponseScale.RAW)
    path = Path(path)
    cloud = pd.DataFrame(
        {
            "x": data.locations[:, 0],
            "y": data.locations[:, 1],
            "z": data.response * data.sign,
        }
    )
    cloud.to_csv(path, sep=" ", header=False, index=False, float_format="%.17g")
    return path
