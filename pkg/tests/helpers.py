"""Shared plumbing for the test suite: CLI invocation and table parsing."""

from pathlib import Path

from pbpqlp import cli


def run_cli(argv):
    """Invoke the command-line tool in-process and return its exit code."""
    return cli.main([str(arg) for arg in argv])


def read_table(path):
    """Parse a harness output table into (comment, header, list of dicts).

    Cells are converted to int or float where possible so tests can compare
    numerically; everything else stays a string.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#"):
        raise AssertionError(f"{path}: missing leading comment line")
    comment = lines[0]
    header = lines[1].split("\t")
    rows = []
    for line in lines[2:]:
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != len(header):
            raise AssertionError(f"{path}: ragged row {line!r}")
        row = {}
        for key, cell in zip(header, cells):
            row[key] = _convert(cell)
        rows.append(row)
    return comment, header, rows


def _convert(cell):
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def table_column(rows, key, **filters):
    """Values of ``key`` over the rows matching all ``filters`` equalities."""
    out = []
    for row in rows:
        if all(row[f] == v for f, v in filters.items()):
            out.append(row[key])
    return out
