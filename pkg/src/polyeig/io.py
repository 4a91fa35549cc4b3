"""On-disk formats: Matrix Market coefficient files, CSV iteration traces,
and flat key-value metadata sidecars; plus whole-problem save/load built
from the three.

Matrix Market writing uses coordinate format with field "complex" and
symmetry "hermitian", storing the lower triangle at 17 significant digits so
a write/read cycle is bit exact.  Reading additionally accepts the dense
"array" format, real/integer fields, and "general" files that turn out to
be Hermitian.  Malformed input raises :class:`ParseError` with the
offending line number.
"""

import csv
import math
import os

import numpy as np

from .exceptions import ParseError
from .matpoly import HermMatrixPolynomial, Interval
from .problems import ProblemBundle
from .solver import TraceRow

__all__ = [
    "load_problem",
    "read_matrix_market",
    "read_metadata",
    "read_trace",
    "save_problem",
    "write_matrix_market",
    "write_metadata",
    "write_trace",
]

TRACE_HEADER = [
    "iter", "rho", "abs_err", "delta", "residual_norm", "normalized_residual",
    "subspace_dim", "orth_check", "linesearch_rho_check", "wall_time_s",
]

_FMT = "%.16e"  # 17 significant digits


def write_matrix_market(M, path, comment=None):
    """Write a Hermitian matrix in coordinate/complex/hermitian format,
    lower triangle only, full double precision."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    entries = [
        (i, j, M[i, j])
        for j in range(n)
        for i in range(j, n)
        if M[i, j] != 0.0
    ]
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate complex hermitian\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"%{line}\n")
        fh.write(f"{n} {n} {len(entries)}\n")
        for i, j, v in entries:
            fh.write(f"{i + 1} {j + 1} {_FMT % v.real} {_FMT % v.imag}\n")


def _parse_header(line, path):
    parts = line.strip().split()
    if len(parts) != 5 or parts[0] != "%%MatrixMarket" or parts[1].lower() != "matrix":
        raise ParseError(f"malformed header {line.strip()!r}", line=1, path=path)
    fmt, fieldtype, symmetry = (p.lower() for p in parts[2:])
    if fmt not in ("coordinate", "array"):
        raise ParseError(f"unsupported format {fmt!r}", line=1, path=path)
    if fieldtype not in ("complex", "real", "integer"):
        raise ParseError(f"unsupported field {fieldtype!r}", line=1, path=path)
    if symmetry not in ("hermitian", "symmetric", "general"):
        raise ParseError(
            f"symmetry {symmetry!r} cannot describe a Hermitian matrix",
            line=1, path=path,
        )
    return fmt, fieldtype, symmetry


def _parse_value(tokens, fieldtype, lineno, path):
    try:
        if fieldtype == "complex":
            if len(tokens) != 2:
                raise ValueError
            return complex(float(tokens[0]), float(tokens[1]))
        if len(tokens) != 1:
            raise ValueError
        return complex(float(tokens[0]), 0.0)
    except ValueError:
        raise ParseError(
            f"bad {fieldtype} value {' '.join(tokens)!r}", line=lineno, path=path
        ) from None


def read_matrix_market(path):
    """Read a Hermitian matrix.

    Coordinate files with hermitian/symmetric symmetry must store the lower
    triangle only (an entry above the diagonal raises :class:`ParseError`
    with its line number) and have exactly real diagonal entries; "general"
    files are accepted when numerically Hermitian.  Dense "array" files
    follow the column-major Matrix Market layout.
    """
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", line=1, path=path)
    fmt, fieldtype, symmetry = _parse_header(lines[0], path)

    body = [
        (lineno, line.strip())
        for lineno, line in enumerate(lines[1:], start=2)
        if line.strip() and not line.lstrip().startswith("%")
    ]
    if not body:
        raise ParseError("missing size line", line=len(lines), path=path)
    size_lineno, size_line = body[0]
    size_tokens = size_line.split()

    if fmt == "coordinate":
        if len(size_tokens) != 3:
            raise ParseError(
                f"coordinate size line needs 3 fields, got {size_line!r}",
                line=size_lineno, path=path,
            )
        nrows, ncols, nnz = (int(t) for t in size_tokens)
        if nrows != ncols:
            raise ParseError(
                f"matrix must be square, got {nrows}x{ncols}",
                line=size_lineno, path=path,
            )
        if len(body) - 1 != nnz:
            raise ParseError(
                f"expected {nnz} entries, found {len(body) - 1}",
                line=size_lineno, path=path,
            )
        M = np.zeros((nrows, ncols), dtype=complex)
        for lineno, line in body[1:]:
            tokens = line.split()
            if len(tokens) < 3:
                raise ParseError(f"short entry line {line!r}", line=lineno, path=path)
            try:
                i, j = int(tokens[0]) - 1, int(tokens[1]) - 1
            except ValueError:
                raise ParseError(
                    f"bad indices in {line!r}", line=lineno, path=path
                ) from None
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise ParseError(f"indices out of range in {line!r}",
                                 line=lineno, path=path)
            v = _parse_value(tokens[2:], fieldtype, lineno, path)
            if symmetry in ("hermitian", "symmetric"):
                if i < j:
                    raise ParseError(
                        "entry above the diagonal in a lower-triangle "
                        f"({symmetry}) file", line=lineno, path=path,
                    )
                if i == j and symmetry == "hermitian" and v.imag != 0.0:
                    raise ParseError(
                        "hermitian diagonal entry has nonzero imaginary part",
                        line=lineno, path=path,
                    )
                M[i, j] = v
                if i != j:
                    M[j, i] = v.conjugate() if symmetry == "hermitian" else v
            else:
                M[i, j] = v
    else:  # array
        if len(size_tokens) != 2:
            raise ParseError(
                f"array size line needs 2 fields, got {size_line!r}",
                line=size_lineno, path=path,
            )
        nrows, ncols = (int(t) for t in size_tokens)
        if nrows != ncols:
            raise ParseError(
                f"matrix must be square, got {nrows}x{ncols}",
                line=size_lineno, path=path,
            )
        if symmetry in ("hermitian", "symmetric"):
            coords = [(i, j) for j in range(ncols) for i in range(j, nrows)]
        else:
            coords = [(i, j) for j in range(ncols) for i in range(nrows)]
        if len(body) - 1 != len(coords):
            raise ParseError(
                f"expected {len(coords)} values, found {len(body) - 1}",
                line=size_lineno, path=path,
            )
        M = np.zeros((nrows, ncols), dtype=complex)
        for (i, j), (lineno, line) in zip(coords, body[1:]):
            v = _parse_value(line.split(), fieldtype, lineno, path)
            M[i, j] = v
            if symmetry in ("hermitian", "symmetric") and i != j:
                M[j, i] = v.conjugate() if symmetry == "hermitian" else v

    if symmetry == "general":
        asym = np.linalg.norm(M - M.conj().T, 1)
        scale = max(np.linalg.norm(M, 1), 1.0)
        if asym > 1e-12 * scale:
            raise ParseError(
                "file declares general symmetry but the matrix is not "
                f"Hermitian (asymmetry {asym:.3e})", line=1, path=path,
            )
        M = 0.5 * (M + M.conj().T)
    return M


def _fmt_float(v):
    return f"{v:.17g}"


def write_trace(rows, path):
    """Write trace rows as CSV under the fixed schema; absent optional
    values become empty fields; reals carry 17 significant digits."""
    if not rows:
        raise ValueError("rows must be nonempty")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for row in rows:
            writer.writerow([
                row.iter,
                _fmt_float(row.rho),
                "" if row.abs_err is None else _fmt_float(row.abs_err),
                _fmt_float(row.delta),
                _fmt_float(row.residual_norm),
                _fmt_float(row.normalized_residual),
                row.subspace_dim,
                _fmt_float(row.orth_check),
                "" if row.linesearch_rho_check is None
                else _fmt_float(row.linesearch_rho_check),
                _fmt_float(row.wall_time_s),
            ])


def read_trace(path):
    """Parse a trace CSV back to TraceRow records (bit-exact values)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise ParseError(f"unexpected trace header {header!r}", line=1, path=path)
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(TRACE_HEADER):
                raise ParseError(
                    f"expected {len(TRACE_HEADER)} fields, got {len(rec)}",
                    line=lineno, path=path,
                )
            try:
                rows.append(TraceRow(
                    iter=int(rec[0]),
                    rho=float(rec[1]),
                    abs_err=None if rec[2] == "" else float(rec[2]),
                    delta=float(rec[3]),
                    residual_norm=float(rec[4]),
                    normalized_residual=float(rec[5]),
                    subspace_dim=int(rec[6]),
                    orth_check=float(rec[7]),
                    linesearch_rho_check=None if rec[8] == "" else float(rec[8]),
                    wall_time_s=float(rec[9]),
                ))
            except ValueError:
                raise ParseError(
                    f"bad numeric field in {rec!r}", line=lineno, path=path
                ) from None
    return rows


def write_metadata(meta, path):
    """Write a flat ``key = value`` sidecar.  Floats carry full precision;
    +inf uses the token "+inf"."""
    with open(path, "w") as fh:
        for key, value in meta.items():
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = "+inf" if math.isinf(value) and value > 0 else _fmt_float(value)
            else:
                text = str(value)
            fh.write(f"{key} = {text}\n")


def _parse_metadata_value(text):
    if text == "+inf":
        return math.inf
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_metadata(path):
    """Parse a sidecar back to a dict; values come back as int, float, bool
    or string by the narrowest type that round-trips."""
    meta = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"missing '=' in {line!r}", line=lineno, path=path)
            key, _, value = line.partition("=")
            meta[key.strip()] = _parse_metadata_value(value.strip())
    return meta


def save_problem(bundle, directory):
    """Write a problem bundle as coefficient Matrix Market files plus a
    metadata sidecar ``problem.meta``."""
    os.makedirs(directory, exist_ok=True)
    F = bundle.polynomial
    names = []
    for k, A in enumerate(F.coeffs):
        name = f"A{k}.mtx"
        write_matrix_market(A, os.path.join(directory, name))
        names.append(name)
    meta = {
        "kind": bundle.kind,
        "degree": F.degree,
        "n": F.n,
        "interval_min": float(F.interval.lo),
        "interval_max": float(F.interval.hi),
        "coefficients": ",".join(names),
    }
    if bundle.known_lambda1 is not None:
        meta["known_lambda1"] = float(bundle.known_lambda1)
    for key, value in bundle.metadata.items():
        meta[f"param_{key}"] = value
    write_metadata(meta, os.path.join(directory, "problem.meta"))


def load_problem(directory):
    """Read a bundle back; the polynomial constructor re-certifies the
    interval anchor on load."""
    meta_path = os.path.join(directory, "problem.meta")
    meta = read_metadata(meta_path)
    for key in ("kind", "degree", "n", "interval_min", "interval_max", "coefficients"):
        if key not in meta:
            raise ParseError(f"metadata is missing the {key!r} key", path=meta_path)
    names = str(meta["coefficients"]).split(",")
    if len(names) != int(meta["degree"]) + 1:
        raise ParseError(
            f"degree {meta['degree']} needs {int(meta['degree']) + 1} coefficient "
            f"files, got {len(names)}", path=meta_path,
        )
    coeffs = [read_matrix_market(os.path.join(directory, name)) for name in names]
    interval = Interval(float(meta["interval_min"]), float(meta["interval_max"]))
    F = HermMatrixPolynomial(coeffs, interval)
    known = meta.get("known_lambda1")
    params = {
        key[len("param_"):]: value
        for key, value in meta.items()
        if key.startswith("param_")
    }
    return ProblemBundle(
        polynomial=F,
        kind=str(meta["kind"]),
        known_lambda1=None if known is None else float(known),
        metadata=params,
    )
