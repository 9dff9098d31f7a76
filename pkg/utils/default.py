import csv
import hashlib
import io
import json
import traceback

from importlib import metadata
from typing import TYPE_CHECKING
from datetime import datetime

from lab.errors import ParseError
from lab.quiver_core import Quiver

if TYPE_CHECKING:
    from utils.data import LabApp

VERSION = "1.0.0"


class CustomContext:
    """
    Everything a command gets to see: the app, the parsed arguments and a
    few shortcuts. Any functions you add here are usable in ALL commands.
    """
    def __init__(self, app: "LabApp", args):
        self.app = app
        self.args = args
        self.command = getattr(args, "command_name", None)
        self._quiver = None

    @property
    def config(self):
        return self.app.config

    @property
    def quiver(self) -> Quiver:
        if self._quiver is None:
            filename = getattr(self.args, "quiver", None)
            if not filename:
                raise ParseError("this command needs --quiver")
            self._quiver = Quiver.from_file(filename)
        return self._quiver

    @property
    def cap(self) -> int:
        cap = getattr(self.args, "cap", None)
        return int(cap) if cap is not None else int(self.config.quiverlab_cap)

    @property
    def primes(self) -> list[int]:
        given = getattr(self.args, "primes", None)
        if given:
            return sorted(int(p) for p in given.replace(" ", "").split(",") if p)
        return self.config.primes

    def send(self, *lines) -> None:
        print("\n".join(str(line) for line in lines))

    def emit(self, report: dict) -> None:
        """ Write the report with its provenance to --out, or print it """
        report = {
            "command": self.command,
            "version": version(),
            "quiver_hash": quiver_hash(getattr(self.args, "quiver", None)),
            **report,
        }
        fmt = getattr(self.args, "format", None) or self.config.quiverlab_format
        out = getattr(self.args, "out", None)
        text = emit(report, fmt)
        if out:
            with open(out, "w", encoding="utf8") as handle:
                handle.write(text)
            self.send(f"✅ Report written to {out}")
        else:
            self.send(text)


def traceback_maker(err, advance: bool = True) -> str:
    """ A way to debug your code anywhere """
    _traceback = "".join(traceback.format_tb(err.__traceback__))
    error = f"{_traceback}{type(err).__name__}: {err}"
    return error if advance else f"{type(err).__name__}: {err}"


def date(target) -> str:
    """ ISO date of a timestamp or datetime """
    if isinstance(target, int) or isinstance(target, float):
        target = datetime.fromtimestamp(target)
    return target.strftime("%Y-%m-%d %H:%M:%S")


def version() -> str:
    try:
        return metadata.version("quiverlab")
    except metadata.PackageNotFoundError:
        return VERSION


def quiver_hash(filename: str | None) -> str | None:
    """ sha256 of a quiver file, embedded in every report """
    if not filename:
        return None
    try:
        with open(filename, "rb") as data:
            return hashlib.sha256(data.read()).hexdigest()
    except OSError:
        return None


def _rows(report: dict) -> list[dict]:
    """ The first list of flat dicts found in a report, for CSV """
    for value in report.values():
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            return value
    return [{k: v for k, v in report.items() if not isinstance(v, (dict, list))}]


def emit(report: dict, fmt: str = "json") -> str:
    """ Deterministic JSON, or a lossy CSV of the report's main table """
    if fmt == "csv":
        rows = _rows(report)
        columns = sorted({k for row in rows for k in row})
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({
                k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v
                for k, v in row.items()
            })
        return buffer.getvalue()
    if fmt != "json":
        raise ParseError(f"unknown format {fmt!r}")
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


def pretty_results(
    ctx: CustomContext, resultmsg: str = "Here's the results:", loop: list = None
) -> None:
    """ A prettier way to show loop results """
    if not loop:
        return ctx.send("The result was empty...")

    pretty = "\r\n".join([f"[{str(num).zfill(2)}] {data}" for num, data in enumerate(loop, start=1)])
    ctx.send(resultmsg, pretty)
