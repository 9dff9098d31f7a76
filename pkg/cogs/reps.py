from utils.default import CustomContext
from utils.data import Cog, LabApp, argument, command
from lab.fields import FieldSpec
from lab.quiver_core import euler_form, reflect_quiver
from lab.rep_lab import (
    Representation, build_label, catalogue, ext1_by_cokernel, ext1_dim, hom_dim,
    identify, parse_label, reflection_apply, spec, validate,
)


def _field(ctx: CustomContext) -> FieldSpec | None:
    given = getattr(ctx.args, "field", None)
    return FieldSpec.parse(given) if given else None


def _read(ctx: CustomContext, filename: str) -> Representation:
    return validate(Representation.from_file(ctx.quiver, filename, _field(ctx)))


class Representations(Cog):
    def __init__(self, app):
        super().__init__(app)
        self.app: LabApp = app

    @command()
    @argument("--quiver", required=True, help="quiver JSON file")
    @argument("--label", required=True, help="e.g. 'P(1,1)', 'U0_2', 'T(1:0)_2', 'P0_3', 'R1_0_2'")
    @argument("--field", default="QQ", help="QQ or a prime, e.g. GF(5)")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    def indecomposable(self, ctx: CustomContext):
        """ The canonical representative of a label """
        label = parse_label(ctx.args.label)
        rep = build_label(ctx.quiver, label, _field(ctx))
        ctx.emit({"label": label.name, "representation": rep.to_dict()})

    @command()
    @argument("--quiver", required=True)
    @argument("--rep", required=True, help="representation JSON file")
    @argument("--field", help="overrides the field named in the file")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    def identify(self, ctx: CustomContext):
        """ Decompose a representation into catalogued indecomposables """
        rep = _read(ctx, ctx.args.rep)
        label = identify(rep)
        report = {"dims": list(rep.dims), "label": label.name, "parts": label.to_dict()}
        if catalogue(ctx.quiver).family == "kronecker":
            found = spec(rep)
            report["spectrum"] = {"regular": found.regular, "points": [list(map(str, z)) for z in found.points]}
        ctx.emit(report)

    @command()
    @argument("--quiver", required=True)
    @argument("--rep", required=True)
    @argument("--vertex", required=True, help="a sink or a source")
    @argument("--field")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    def reflect(self, ctx: CustomContext):
        """ Reflection functor at a sink (kernel) or a source (cokernel) """
        rep = _read(ctx, ctx.args.rep)
        image = reflection_apply(ctx.args.vertex, rep)
        ctx.emit({
            "vertex": ctx.args.vertex,
            "quiver": reflect_quiver(ctx.quiver, ctx.args.vertex).to_dict(),
            "representation": image.to_dict(),
        })

    @command()
    @argument("--quiver", required=True)
    @argument("--rep", required=True, help="the source representation M")
    @argument("--rep2", required=True, help="the target representation N")
    @argument("--field")
    @argument("--out")
    @argument("--format", choices=["json", "csv"])
    def hom(self, ctx: CustomContext):
        """ dim Hom(M, N) and dim Ext^1(M, N), the latter two ways """
        M, N = _read(ctx, ctx.args.rep), _read(ctx, ctx.args.rep2)
        ctx.emit({
            "hom": hom_dim(M, N),
            "ext1": ext1_dim(M, N),
            "ext1_cokernel": ext1_by_cokernel(M, N),
            "euler_form": euler_form(ctx.quiver, M.dims, N.dims),
        })


def setup(app):
    app.add_cog(Representations(app))
