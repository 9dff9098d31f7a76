import time
import platform
import psutil
import os

import networkx
import sympy

from utils.default import CustomContext
from utils import default
from utils.data import Cog, LabApp, command


class Information(Cog):
    def __init__(self, app):
        super().__init__(app)
        self.app: LabApp = app
        self.process = psutil.Process(os.getpid())

    @command(aliases=["info", "stats", "status"])
    def about(self, ctx: CustomContext):
        """ About the lab """
        ramUsage = self.process.memory_full_info().rss / 1024**2
        started = getattr(self.app, "uptime", None)

        ctx.send(
            f"ℹ About **quiverlab** {default.version()}",
            f"Started: {default.date(started) if started else default.date(time.time())}",
            f"Python: {platform.python_version()} | sympy {sympy.__version__} | networkx {networkx.__version__}",
            f"Commands loaded: {len(self.app.commands)}",
            f"Workers: {ctx.config.workers} (of {psutil.cpu_count()} CPUs)",
            f"Limits: total dim <= {ctx.config.quiverlab_max_total_dim}, primes <= {ctx.config.quiverlab_max_prime}",
            f"RAM: {ramUsage:.2f} MB",
        )

    @command()
    def commands(self, ctx: CustomContext):
        """ List every loaded command """
        default.pretty_results(ctx, "Loaded commands:", sorted(self.app.commands))


def setup(app):
    app.add_cog(Information(app))
