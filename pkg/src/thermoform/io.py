"""Text formats: transition matrices, cylinder potentials, result files and CSV tables.

Transition matrix file::

    # comment
    2
    1 1
    1 0

Potential file (one line per admissible word, symbols then value)::

    range 2
    0 0  0.0
    0 1  1.5
    1 0 -0.25
"""

import csv
import os

import numpy as np

from .errors import InputError
from .potentials import CylinderPotential
from .sft import enumerate_admissible, validate


def _content_lines(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def parse_sft(text):
    lines = list(_content_lines(text))
    if not lines:
        raise InputError("empty transition-matrix file")
    try:
        n = int(lines[0])
    except ValueError:
        raise InputError(f"first line must be the alphabet size, got {lines[0]!r}")
    if len(lines) - 1 != n:
        raise InputError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for i, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != n:
            raise InputError(f"row {i} has {len(parts)} entries, expected {n}")
        try:
            rows.append([int(p) for p in parts])
        except ValueError:
            raise InputError(f"row {i} contains a non-integer entry")
    return validate(rows)


def read_sft(path):
    with open(path, encoding="utf-8") as fh:
        return parse_sft(fh.read())


def parse_potential(text, A):
    lines = list(_content_lines(text))
    if not lines:
        raise InputError("empty potential file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "range":
        raise InputError("potential file must start with 'range k'")
    try:
        k = int(head[1])
    except ValueError:
        raise InputError(f"bad range {head[1]!r}")
    if k < 1:
        raise InputError("range must be at least 1")
    words = enumerate_admissible(A, k)
    index = {w: i for i, w in enumerate(words)}
    values = np.full(len(words), np.nan)
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != k + 1:
            raise InputError(f"line {line!r}: expected {k} symbols and a value")
        try:
            word = tuple(int(p) for p in parts[:k])
            val = float(parts[k])
        except ValueError:
            raise InputError(f"line {line!r} does not parse")
        if word not in index:
            raise InputError(f"{word} is not an admissible {k}-word")
        if not np.isnan(values[index[word]]):
            raise InputError(f"duplicate entry for {word}")
        values[index[word]] = val
    missing = [w for w, v in zip(words, values) if np.isnan(v)]
    if missing:
        raise InputError(f"no value for {len(missing)} admissible word(s), e.g. {missing[0]}")
    return CylinderPotential(A, k, values)


def read_potential(path, A):
    with open(path, encoding="utf-8") as fh:
        return parse_potential(fh.read(), A)


def format_potential(phi):
    lines = [f"range {phi.range}"]
    for w, v in zip(phi.words, phi.values):
        lines.append(" ".join(str(a) for a in w) + " " + format_number(v))
    return "\n".join(lines) + "\n"


def format_number(x):
    """Full-precision text for result files (17 significant digits for floats)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_results(path, items):
    """Flat ``key = value`` file, one pair per line in the given order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, val in items:
            fh.write(f"{key} = {format_number(val)}\n")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_number(v) for v in row])


def read_config(path):
    """``key = value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(_content_lines(fh.read()), 1):
            if "=" not in line:
                raise InputError(f"config line {n}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
