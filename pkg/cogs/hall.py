import re

from utils.default import CustomContext
from utils.data import Cog, LabApp, argument, command, group
from utils import permissions
from lab.errors import VerificationFailed
from lab.hall_engine import (
    ConstructibleFn, HallEngine, associativity_check, cyclic_products_check,
    generate_nstar, integral_nstar_check, kronecker_products_check, make_engine,
    mu_pushforward, riedtmann_check, verify_affine, verify_ringel,
)
from lab.rep_lab import parse_label
from lab.root_system import imaginary_degree

GRADE = re.compile(r"^E\(([\d,\s]+)\)$")


def engine_for(ctx: CustomContext) -> HallEngine:
    return make_engine(ctx.quiver, ctx.config, primes=ctx.primes or None)


def function(engine: HallEngine, text: str) -> ConstructibleFn:
    """ 'E(1,1)' is 1 on every indecomposable of that grade, anything else a label indicator """
    match = GRADE.match(text.replace(" ", ""))
    if match:
        return engine.characteristic(tuple(int(x) for x in match[1].split(",")))
    return engine.indicator(parse_label(text))


def finish(ctx: CustomContext, reports: list[dict], **extra):
    ctx.emit({**extra, "checks": reports, "passed": all(r["passed"] for r in reports)})
    for report in reports:
        if not report["passed"]:
            raise VerificationFailed(report)


class Hall(Cog):
    def __init__(self, app):
        super().__init__(app)
        self.app: LabApp = app

    @command(name="hall-number")
    @argument("--quiver", required=True)
    @argument("--sub", required=True, help="iso label of the subobject A")
    @argument("--quotient", required=True, help="iso label of the quotient B")
    @argument("--total", required=True, help="iso label of C")
    @argument("--primes", help="comma list, at least degree bound + 2 of them")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("finite", "kronecker", "cyclic", "affine")
    def hall_number(self, ctx: CustomContext):
        """ Euler characteristic of {V in C : V = A, C/V = B} by point counting """
        engine = engine_for(ctx)
        count = engine.hall_number(
            parse_label(ctx.args.sub), parse_label(ctx.args.quotient), parse_label(ctx.args.total),
        )
        ctx.emit({"hall": [count.to_dict()]})

    @command()
    @argument("--quiver", required=True)
    @argument("--f", required=True, help="'E(0,1)' or a label such as 'U1_0'")
    @argument("--g", required=True)
    @argument("--bracket", action="store_true", help="f*g - g*f instead of f*g")
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("finite", "kronecker", "cyclic", "affine")
    def star(self, ctx: CustomContext):
        """ Convolution product of two functions """
        engine = engine_for(ctx)
        f, g = function(engine, ctx.args.f), function(engine, ctx.args.g)
        value = engine.bracket(f, g) if ctx.args.bracket else engine.star(f, g)
        ctx.emit({
            "f": f.to_dict(), "g": g.to_dict(), "result": value.to_dict(),
            "indecomposable_part": value.on_indecomposables().to_dict(),
        })

    @command(name="generate-nstar")
    @argument("--quiver", required=True)
    @argument("--cap", type=int)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("finite", "kronecker", "cyclic", "affine")
    def generate_nstar(self, ctx: CustomContext):
        """ Close {E_i} under the bracket up to cap*delta """
        nstar = generate_nstar(engine_for(ctx), ctx.cap)
        ctx.emit({
            "dimensions": [{"grade": list(g), "dimension": d} for g, d in nstar.dimensions().items()],
            **nstar.to_dict(),
        })
        for check in nstar.checks:
            if not check["passed"]:
                raise VerificationFailed(check)

    @command(name="mu-check")
    @argument("--quiver", required=True)
    @argument("--cap", type=int)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_affine()
    def mu_check(self, ctx: CustomContext):
        """ Fiber sums of the generated imaginary-grade functions are constant """
        engine = engine_for(ctx)
        nstar = generate_nstar(engine, ctx.cap)
        rows, failures = [], []
        for grade, basis in nstar.grades.items():
            if not imaginary_degree(ctx.quiver, grade):
                continue
            for f in basis:
                report = mu_pushforward(engine, f)
                rows.append(report)
                if not report["constant"]:
                    failures.append(report)
        finish(ctx, [{"check": "mu-constant", "failures": failures, "passed": not failures}], pushforwards=rows)

    @group()
    def verify(self, ctx: CustomContext):
        """ Compare the function algebra with the Euler-cocycle algebra """

    @verify.command()
    @argument("--quiver", required=True)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("finite")
    def ringel(self, ctx: CustomContext):
        """ Finite type: generators, the xi map, structure constants, associativity """
        engine = engine_for(ctx)
        reports = verify_ringel(engine)
        simples = [engine.generator(i) for i in range(len(ctx.quiver))]
        reports.append(associativity_check(engine, simples))
        finish(ctx, reports, hall=[c.to_dict() for c in engine.records])

    @verify.command()
    @argument("--quiver", required=True)
    @argument("--cap", type=int)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_affine()
    def affine(self, ctx: CustomContext):
        """ Affine type: generators, the xi map, fiber sums and product tables up to cap*delta """
        finish(ctx, verify_affine(engine_for(ctx), ctx.cap))

    @verify.command()
    @argument("--quiver", required=True)
    @argument("--cap", type=int)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_affine()
    def integral(self, ctx: CustomContext):
        """ Z-closure of {E_i}: integral values and the listed generators """
        finish(ctx, [integral_nstar_check(engine_for(ctx), ctx.cap)])

    @verify.command()
    @argument("--quiver", required=True)
    @argument("--n-max", type=int, default=3)
    @argument("--max-len", type=int, default=4)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("kronecker", "cyclic")
    def products(self, ctx: CustomContext):
        """ The product tables of Kronecker or cyclic indecomposables """
        engine = engine_for(ctx)
        if engine.family == "kronecker":
            report = kronecker_products_check(engine, ctx.args.n_max)
        else:
            report = cyclic_products_check(engine, ctx.args.max_len)
        finish(ctx, [report])

    @verify.command()
    @argument("--quiver", required=True)
    @argument("--pairs", type=int, default=20)
    @argument("--seed", type=int, default=0)
    @argument("--primes")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    @permissions.requires_family("finite", "kronecker", "cyclic", "affine")
    def riedtmann(self, ctx: CustomContext):
        """ n(M', M''; M' + M'') is 1 or 2 on random indecomposable pairs """
        engine = engine_for(ctx)
        finish(ctx, [riedtmann_check(engine, ctx.args.pairs, ctx.args.seed)],
               hall=[c.to_dict() for c in engine.records])


def setup(app):
    app.add_cog(Hall(app))
