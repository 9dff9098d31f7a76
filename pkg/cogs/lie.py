from utils.default import CustomContext
from utils.data import Cog, LabApp, argument, command, group
from utils import permissions
from lab.errors import VerificationFailed
from lab.lie_epsilon import (
    cyclic_closed_form, eta_check, integral_form_check, kronecker_closed_form,
    make_algebra, twist_compare, verify_jacobi, verify_serre,
)
from lab.quiver_core import Quiver


class Lie(Cog):
    def __init__(self, app):
        super().__init__(app)
        self.app: LabApp = app

    @group(name="lie-epsilon")
    def lie_epsilon(self, ctx: CustomContext):
        """ The Euler-cocycle algebra of a quiver """

    @lie_epsilon.command()
    @argument("--quiver", required=True, help="quiver JSON file")
    @argument("--cap", type=int, help="largest multiple of delta (affine quivers)")
    @argument("--variant", choices=["euler", "twisted"], default="euler")
    @argument("--jacobi-sample", default="all", help="'all' or a number of random triples")
    @argument("--out", help="write the report here instead of stdout")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("finite", "kronecker", "cyclic", "affine")
    def table(self, ctx: CustomContext):
        """ Structure constants of the Euler-cocycle algebra, with its checks """
        alg = make_algebra(ctx.quiver, ctx.args.variant, ctx.cap)
        checks = [verify_serre(alg), verify_jacobi(alg, ctx.args.jacobi_sample)]
        if alg.affine:
            checks.append(integral_form_check(alg))
            other = make_algebra(ctx.quiver, "twisted" if alg.variant == "euler" else "euler", alg.cap)
            checks.append(twist_compare(alg, other) if alg.variant == "euler" else twist_compare(other, alg))
        if alg.dynkin.kronecker:
            checks.append(kronecker_closed_form(alg))
        if alg.dynkin.cyclic and alg.variant == "euler" and not alg.dynkin.jordan:
            checks.append(cyclic_closed_form(alg))

        ctx.emit({
            "variant": alg.variant,
            "cap": alg.cap,
            "basis": [s.name for s in alg.basis],
            "table": alg.table(),
            "checks": checks,
            "passed": all(c["passed"] for c in checks),
        })
        for check in checks:
            if not check["passed"]:
                raise VerificationFailed(check)

    @command()
    @argument("--quiver", required=True, help="the C_2 quiver")
    @argument("--target", required=True, help="the Kronecker quiver")
    @argument("--cap", type=int)
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    def eta(self, ctx: CustomContext):
        """ The isomorphism from the C_2 algebra to the Kronecker algebra """
        source = make_algebra(ctx.quiver, "euler", ctx.cap)
        target = make_algebra(Quiver.from_file(ctx.args.target), "euler", ctx.cap)
        report = eta_check(source, target)
        ctx.emit(report)
        if not report["passed"]:
            raise VerificationFailed(report)


def setup(app):
    app.add_cog(Lie(app))
