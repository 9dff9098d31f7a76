import json
import logging

from datetime import datetime
from utils.default import CustomContext
from utils import default
from utils.data import Cog, LabApp
from lab.errors import (
    AssumptionViolated, CapExceeded, ClassificationError, OracleError, ParseError,
    QuiverError, ShapeError, UnsupportedFamily, VerificationFailed,
)

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_ORACLE = 3


class Events(Cog):
    def __init__(self, app):
        super().__init__(app)
        self.app: LabApp = app

    def on_command_error(self, ctx: CustomContext, err: Exception) -> int:
        if isinstance(err, VerificationFailed):
            ctx.send(f"❌ {err}")
            for failure in err.report.get("failures", [])[:20]:
                ctx.send(f"  - {failure}")
            return EXIT_FAILED

        if isinstance(err, (ParseError, json.JSONDecodeError, FileNotFoundError, QuiverError, ShapeError)):
            ctx.send(f"❌ Could not read the input: {err}")
            code = EXIT_PARSE

        elif isinstance(err, (CapExceeded, OracleError)):
            ctx.send(f"❌ The counting oracle gave up: {err}")
            code = EXIT_ORACLE

        elif isinstance(err, (ClassificationError, UnsupportedFamily, AssumptionViolated)):
            ctx.send(f"❌ {ctx.command} does not apply here: {err}")
            code = EXIT_ORACLE

        else:
            error = default.traceback_maker(err)
            logger.error("unexpected error in %s", ctx.command)
            ctx.send(f"There was an error processing the command ;-;\n{error}")
            code = EXIT_ORACLE

        self.report_error(ctx, err)
        return code

    def report_error(self, ctx: CustomContext, err: Exception) -> None:
        """ The report of a failed run still lands where --out points """
        try:
            ctx.emit({"error": type(err).__name__, "message": str(err), "passed": False})
        except (ParseError, OSError) as failed:
            logger.warning("could not write the error report: %s", failed)

    def on_command(self, ctx: CustomContext):
        if not hasattr(self.app, "uptime"):
            self.app.uptime = datetime.now()
        location_name = getattr(ctx.args, "quiver", None) or "no quiver"
        logger.info("%s > %s", location_name, ctx.command)


def setup(app):
    app.add_cog(Events(app))
