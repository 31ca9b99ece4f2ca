"""Text matrix files and decomposition reports.

A matrix file is UTF-8 text: a header line "rows cols" followed by
rows * cols whitespace-separated entries, normally one matrix row per line.
Each entry is an integer literal or a "p/q" rational literal with q != 0.
Lines starting with "#" are comments. Printing always uses the canonical
form (reduced, positive denominator), so parse-then-print is stable.

Decomposition reports serialize every matrix entry as a string ("p/q" or
"p") so JSON never loses exactness.
"""

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import MatrixFileError
from .exactcore import as_rat_matrix, is_integral, to_int_matrix
from .sympsnf import SympSmithDecomposition, verify_decomposition

_ENTRY = re.compile(r"^[+-]?[0-9]+(/[0-9]+)?$")
_SIZE = re.compile(r"^[0-9]+$")


def parse_entry(token, line=None):
    if not _ENTRY.match(token):
        raise MatrixFileError(f"invalid entry {token!r}", line)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise MatrixFileError(f"zero denominator in {token!r}", line) from None


def parse_matrix(text):
    """Parse matrix file text.

    Returns:
        tuple: (rational matrix, list of comment lines without the "#")

    Raises:
        MatrixFileError: on any format problem
    """
    comments = []
    header = None
    entries = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        tokens = line.split()
        if header is None:
            if len(tokens) != 2 or not all(_SIZE.match(t) for t in tokens):
                raise MatrixFileError("header must be 'rows cols'", number)
            header = (int(tokens[0]), int(tokens[1]))
            continue
        entries.extend(parse_entry(t, number) for t in tokens)
    if header is None:
        raise MatrixFileError("missing 'rows cols' header")
    rows, cols = header
    if rows == 0 or cols == 0:
        raise MatrixFileError(f"empty matrix {rows}x{cols}")
    if len(entries) != rows * cols:
        raise MatrixFileError(f"expected {rows * cols} entries for a {rows}x{cols} matrix, found {len(entries)}")
    return as_rat_matrix(np.array(entries, dtype=object).reshape(rows, cols)), comments


def read_matrix(path):
    """Read a matrix file; see parse_matrix."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise MatrixFileError(f"cannot read {path}: {e}") from None
    return parse_matrix(text)


def format_entry(x):
    return str(Fraction(x))


def format_matrix(g, comments=()):
    """Canonical matrix file text for g."""
    g = np.asarray(g, dtype=object)
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.shape[0]} {g.shape[1]}")
    lines += [" ".join(format_entry(x) for x in row) for row in g]
    return "\n".join(lines) + "\n"


def matrix_to_json(g):
    return [[format_entry(x) for x in row] for row in np.asarray(g, dtype=object)]


def matrix_from_json(rows, what):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MatrixFileError(f"{what} must be a nonempty list of rows")
    if len({len(r) for r in rows}) != 1:
        raise MatrixFileError(f"{what} rows have different lengths")
    return as_rat_matrix([[parse_entry(str(x)) for x in r] for r in rows])


@dataclass
class DecompositionReport:
    """Everything the decompose command prints.

    The verification is recomputed from the other fields when the report
    is built, so a report never carries a stale verdict.
    """

    g: np.ndarray
    decomposition: SympSmithDecomposition
    locals: list = None
    words: bool = False
    verification: object = field(init=False)

    def __post_init__(self):
        self.verification = verify_decomposition(self.g, self.decomposition)

    def to_dict(self):
        dec = self.decomposition
        out = {
            "n": dec.n,
            "m": dec.m,
            "d": list(dec.d),
            "sigma": matrix_to_json(dec.sigma),
            "sigma_prime": matrix_to_json(dec.sigma_prime),
            "verification": self.verification.to_dict(),
            "ok": self.verification.ok,
            "input": matrix_to_json(self.g),
        }
        if self.locals is not None:
            out["locals"] = [local.to_dict() for local in self.locals]
        if self.words and dec.sigma_word is not None:
            out["words"] = {
                "sigma": [f.to_dict() for f in dec.sigma_word.factors],
                "sigma_prime": [f.to_dict() for f in dec.sigma_prime_word.factors],
            }
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self):
        dec = self.decomposition
        lines = [
            "input:",
            format_matrix(self.g).rstrip("\n"),
            f"n: {dec.n}",
            f"m: {dec.m}",
            "d: " + " ".join(str(x) for x in dec.d),
            "sigma:",
            format_matrix(dec.sigma).rstrip("\n"),
            "sigma_prime:",
            format_matrix(dec.sigma_prime).rstrip("\n"),
            "verification:",
        ]
        lines += ["  " + line for line in self.verification.lines()]
        if self.locals is not None:
            lines.append("locals:")
            lines += ["  " + local.line() for local in self.locals]
        if self.words and dec.sigma_word is not None:
            lines.append("sigma word:")
            lines += ["  " + f.label() for f in dec.sigma_word.factors]
            lines.append("sigma_prime word:")
            lines += ["  " + f.label() for f in dec.sigma_prime_word.factors]
        return "\n".join(lines) + "\n"


def decomposition_from_dict(data):
    """Rebuild a decomposition (without words) from decompose --json output.

    Raises:
        MatrixFileError: if required keys are missing or malformed
    """
    if not isinstance(data, dict):
        raise MatrixFileError("decomposition must be a JSON object")
    for key in ("d", "sigma", "sigma_prime"):
        if key not in data:
            raise MatrixFileError(f"decomposition is missing {key!r}")
    d = data["d"]
    if not isinstance(d, list) or not d or not all(isinstance(x, int) and not isinstance(x, bool) for x in d):
        raise MatrixFileError("'d' must be a nonempty list of integers")
    sigma = matrix_from_json(data["sigma"], "sigma")
    sigma_prime = matrix_from_json(data["sigma_prime"], "sigma_prime")
    if is_integral(sigma):
        sigma = to_int_matrix(sigma)
    if is_integral(sigma_prime):
        sigma_prime = to_int_matrix(sigma_prime)
    m = data.get("m", 1)
    return SympSmithDecomposition(sigma=sigma, d=tuple(d), sigma_prime=sigma_prime, m=m if isinstance(m, int) else 1)


def read_decomposition(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, UnicodeDecodeError) as e:
        raise MatrixFileError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise MatrixFileError(f"invalid JSON in {path}: {e.msg}", e.lineno) from None
    return decomposition_from_dict(data)
