"""
File Formats Module

Versioned on-disk formats shared by the CLI commands:
- QuorumFile (JSON, evrep-quorum/1): the direction scheme and its condition number
- OperatorFile (JSON, evrep-state/1 or evrep-operator/1): a Hermitian matrix as [re, im] pairs
- CheckReportFile (JSON, evrep-check/1): swcheck results
- Probability and trajectory CSV files with a leading "# <format>" line

Readers validate the version, counts and finiteness and raise FileFormatError.
JSON floats are written as shortest round-trip reprs, CSV floats with 17
significant digits.
"""

import csv
import math
import typing
from pathlib import Path

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, Field

from ..checks.swcheck import CheckReport, SuiteReport
from ..core.exceptions import EvrepError, FileFormatError
from ..core.types import Direction, HermitianOperator, RealArray, TwoS
from ..frames.quorum import DirectionScheme, Quorum, build_quorum
from ..tomo.tomography import DensityMatrix, ProbabilityVector

QUORUM_FORMAT = "evrep-quorum/1"
STATE_FORMAT = "evrep-state/1"
OPERATOR_FORMAT = "evrep-operator/1"
CHECK_FORMAT = "evrep-check/1"
PROBABILITY_FORMAT = "evrep-probabilities/1"
TRAJECTORY_FORMAT = "evrep-trajectory/1"

# Stored directions must match the regenerated cone scheme to this accuracy
DIRECTION_ATOL = 1e-12

PathLike = typing.Union[str, Path]


def _fmt(x: float) -> str:
    return "%.17g" % x


class DirectionEntry(BaseModel):
    theta: float
    phi: float


class QuorumFile(BaseModel):
    """A serialized DirectionScheme; cone lists are empty for unstructured schemes."""
    model_config = ConfigDict(extra="forbid")

    format: typing.Literal["evrep-quorum/1"] = QUORUM_FORMAT
    two_s: int
    cone_thetas: typing.List[float] = Field(default_factory=list)
    cone_phi_offsets: typing.List[float] = Field(default_factory=list)
    directions: typing.List[DirectionEntry]
    condition_number: float


class OperatorFile(BaseModel):
    """A d x d Hermitian matrix, row-major, one [re, im] pair per entry."""
    model_config = ConfigDict(extra="forbid")

    format: typing.Literal["evrep-state/1", "evrep-operator/1"]
    two_s: int
    matrix: typing.List[typing.Tuple[float, float]]


class CheckReportFile(BaseModel):
    format: typing.Literal["evrep-check/1"] = CHECK_FORMAT
    two_s: int
    passed: bool
    checks: typing.List[CheckReport]


def _load_model(path: PathLike, model: typing.Type[BaseModel]) -> typing.Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise FileFormatError(str(p), f"cannot read file ({e.strerror or e})")
    except UnicodeDecodeError as e:
        raise FileFormatError(str(p), f"not valid UTF-8 (byte {e.start})")
    try:
        return model.model_validate_json(text)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ()))
        raise FileFormatError(str(p), f"{where}: {first.get('msg', 'invalid value')}")


def _dump_model(path: PathLike, model: BaseModel) -> Path:
    p = Path(path)
    p.write_text(model.model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")
    return p


def _require_finite(path: PathLike, values: typing.Iterable[float], what: str) -> None:
    if not all(math.isfinite(v) for v in values):
        raise FileFormatError(str(path), f"{what} must be finite")


# Quorum files

def quorum_to_file(q: Quorum) -> QuorumFile:
    s = q.scheme
    return QuorumFile(
        two_s=s.two_s.two_s,
        cone_thetas=list(s.cone_thetas),
        cone_phi_offsets=list(s.cone_phi_offsets),
        directions=[DirectionEntry(theta=d.theta, phi=d.phi) for d in s.directions],
        condition_number=q.condition_number,
    )


def write_quorum(path: PathLike, q: Quorum) -> Path:
    return _dump_model(path, quorum_to_file(q))


def read_quorum_file(path: PathLike) -> QuorumFile:
    """Parse and validate a quorum file without building the quorum."""
    data: QuorumFile = _load_model(path, QuorumFile)
    _require_finite(path, data.cone_thetas + data.cone_phi_offsets, "cone angles")
    _require_finite(path, [v for d in data.directions for v in (d.theta, d.phi)], "directions")
    return data


def scheme_from_file(path: PathLike, data: QuorumFile) -> DirectionScheme:
    """
    Rebuild the DirectionScheme described by a quorum file.

    Cone schemes are regenerated from their cone lists and must reproduce the
    stored directions.

    Raises:
        FileFormatError: If the scheme is invalid or the stored directions disagree
    """
    try:
        ts = TwoS(data.two_s)
        if data.cone_thetas or data.cone_phi_offsets:
            scheme = DirectionScheme.from_cones(ts, data.cone_thetas, data.cone_phi_offsets)
        else:
            dirs = [Direction(d.theta, d.phi) for d in data.directions]
            scheme = DirectionScheme.from_directions(ts, dirs)
        if len(data.directions) != scheme.size:
            raise FileFormatError(str(path), f"expected {scheme.size} directions, got {len(data.directions)}")
        stored = np.array([Direction(d.theta, d.phi).unit_vector() for d in data.directions])
    except FileFormatError:
        raise
    except EvrepError as e:
        raise FileFormatError(str(path), str(e))

    deviation = float(np.max(np.abs(stored - scheme.unit_vectors())))
    if deviation > DIRECTION_ATOL:
        raise FileFormatError(str(path), f"directions do not match the cone lists (deviation {deviation:.3e})")
    return scheme


def read_quorum(path: PathLike) -> typing.Tuple[Quorum, QuorumFile]:
    """
    Load a quorum file and rebuild the Quorum from its scheme.

    Raises:
        FileFormatError: For malformed files
        IllConditionedSchemeError: If the stored scheme has a singular Gram matrix
    """
    data = read_quorum_file(path)
    return build_quorum(scheme_from_file(path, data)), data


# Operator and state files

def operator_to_file(op: HermitianOperator, fmt: str = OPERATOR_FORMAT) -> OperatorFile:
    flat = op.matrix.reshape(-1)
    return OperatorFile(
        format=fmt,
        two_s=op.dim - 1,
        matrix=[(float(z.real), float(z.imag)) for z in flat],
    )


def write_operator(path: PathLike, op: HermitianOperator, fmt: str = OPERATOR_FORMAT) -> Path:
    return _dump_model(path, operator_to_file(op, fmt))


def write_state(path: PathLike, rho: DensityMatrix) -> Path:
    return write_operator(path, rho.op, STATE_FORMAT)


def read_operator(path: PathLike, expected_format: typing.Optional[str] = None) -> HermitianOperator:
    """
    Read a Hermitian operator.

    Raises:
        FileFormatError: For a wrong format tag, a matrix of the wrong size,
            non-finite entries or a non-Hermitian matrix
    """
    data: OperatorFile = _load_model(path, OperatorFile)
    if expected_format is not None and data.format != expected_format:
        raise FileFormatError(str(path), f"expected format {expected_format}, got {data.format}")
    try:
        d = TwoS(data.two_s).dim
    except EvrepError as e:
        raise FileFormatError(str(path), str(e))
    if len(data.matrix) != d * d:
        raise FileFormatError(str(path), f"expected {d * d} matrix entries, got {len(data.matrix)}")
    _require_finite(path, [v for pair in data.matrix for v in pair], "matrix entries")
    m = np.array([complex(re, im) for re, im in data.matrix]).reshape(d, d)
    try:
        return HermitianOperator(m)
    except EvrepError as e:
        raise FileFormatError(str(path), str(e))


def read_state(path: PathLike) -> DensityMatrix:
    """Read a density matrix written with the evrep-state/1 tag."""
    return DensityMatrix(read_operator(path, STATE_FORMAT))


# Check reports

def write_check_report(path: PathLike, suite: SuiteReport, extra: typing.Sequence[CheckReport] = ()) -> Path:
    checks = list(suite.checks) + list(extra)
    report = CheckReportFile(two_s=suite.two_s, passed=all(c.passed for c in checks), checks=checks)
    return _dump_model(path, report)


def read_check_report(path: PathLike) -> CheckReportFile:
    return _load_model(path, CheckReportFile)


def write_json(path: PathLike, model: BaseModel) -> Path:
    """Write any report model as indented JSON."""
    return _dump_model(path, model)


# CSV files

def _read_csv(path: PathLike, fmt: str) -> typing.Tuple[typing.List[str], typing.List[typing.List[str]]]:
    p = Path(path)
    try:
        with p.open(newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as e:
        raise FileFormatError(str(p), f"cannot read file ({e.strerror or e})")
    except UnicodeDecodeError as e:
        raise FileFormatError(str(p), f"not valid UTF-8 (byte {e.start})")
    except csv.Error as e:
        raise FileFormatError(str(p), f"malformed CSV ({e})")
    if not rows or rows[0][0].strip() != f"# {fmt}":
        raise FileFormatError(str(p), f"missing '# {fmt}' format line")
    if len(rows) < 2:
        raise FileFormatError(str(p), "missing header")
    return [h.strip() for h in rows[1]], rows[2:]


def _parse_float(path: PathLike, text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FileFormatError(str(path), f"{where}: not a number ({text!r})")
    if not math.isfinite(value):
        raise FileFormatError(str(path), f"{where}: value must be finite")
    return value


def write_probabilities(path: PathLike, scheme: DirectionScheme, p: ProbabilityVector) -> Path:
    """One row per direction: n, theta, phi, value and, for sampled data, count and shots."""
    out = Path(path)
    sampled = p.counts is not None
    with out.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {PROBABILITY_FORMAT}\n")
        writer = csv.writer(fh, lineterminator="\n")
        header = ["n", "theta", "phi", "value"] + (["count", "shots"] if sampled else [])
        writer.writerow(header)
        for n, (d, value) in enumerate(zip(scheme.directions, p.values)):
            row = [str(n), _fmt(d.theta), _fmt(d.phi), _fmt(float(value))]
            if sampled:
                row += [str(int(p.counts[n])), str(p.shots)]
            writer.writerow(row)
    return out


def read_probabilities(path: PathLike, scheme: typing.Optional[DirectionScheme] = None) -> ProbabilityVector:
    """
    Read a probability CSV, checking indices and, if given, the directions of `scheme`.

    Raises:
        FileFormatError: For a missing format line, a wrong header, missing or
            out-of-order rows, non-numeric values or mismatched directions
    """
    header, rows = _read_csv(path, PROBABILITY_FORMAT)
    if header not in (["n", "theta", "phi", "value"], ["n", "theta", "phi", "value", "count", "shots"]):
        raise FileFormatError(str(path), f"unexpected header {','.join(header)}")
    sampled = len(header) == 6
    if scheme is not None and len(rows) != scheme.size:
        raise FileFormatError(str(path), f"expected {scheme.size} rows, got {len(rows)}")

    values, counts, shots = [], [], set()
    for i, row in enumerate(rows):
        where = f"row {i}"
        if len(row) != len(header):
            raise FileFormatError(str(path), f"{where}: expected {len(header)} fields, got {len(row)}")
        if row[0].strip() != str(i):
            raise FileFormatError(str(path), f"{where}: index {row[0]!r} out of order")
        theta = _parse_float(path, row[1], where)
        phi = _parse_float(path, row[2], where)
        if scheme is not None:
            d = scheme.directions[i]
            if abs(theta - d.theta) > DIRECTION_ATOL or abs(phi - d.phi) > DIRECTION_ATOL:
                raise FileFormatError(str(path), f"{where}: direction does not match the quorum")
        values.append(_parse_float(path, row[3], where))
        if sampled:
            try:
                counts.append(int(row[4]))
                shots.add(int(row[5]))
            except ValueError:
                raise FileFormatError(str(path), f"{where}: count and shots must be integers")

    if not values:
        raise FileFormatError(str(path), "no data rows")
    if not sampled:
        return ProbabilityVector(np.array(values))
    if len(shots) != 1:
        raise FileFormatError(str(path), "shots must be the same on every row")
    try:
        return ProbabilityVector(np.array(values), shots=shots.pop(), counts=np.array(counts))
    except EvrepError as e:
        raise FileFormatError(str(path), str(e))


def write_trajectory(path: PathLike, rows: typing.Sequence[typing.Tuple[float, RealArray]]) -> Path:
    """Header t,P_0,...,P_{N-1}; one row per sampled time."""
    out = Path(path)
    size = len(rows[0][1]) if rows else 0
    with out.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {TRAJECTORY_FORMAT}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"P_{n}" for n in range(size)])
        for t, p in rows:
            writer.writerow([_fmt(t)] + [_fmt(float(v)) for v in p])
    return out


def read_trajectory(path: PathLike) -> typing.List[typing.Tuple[float, RealArray]]:
    header, rows = _read_csv(path, TRAJECTORY_FORMAT)
    size = len(header) - 1
    if header[:1] != ["t"] or header[1:] != [f"P_{n}" for n in range(size)]:
        raise FileFormatError(str(path), f"unexpected header {','.join(header[:3])}...")
    out = []
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise FileFormatError(str(path), f"row {i}: expected {len(header)} fields, got {len(row)}")
        values = [_parse_float(path, v, f"row {i}") for v in row]
        out.append((values[0], np.array(values[1:])))
    return out
