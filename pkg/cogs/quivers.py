from utils.default import CustomContext
from utils.data import Cog, LabApp, argument, command
from utils import permissions
from lab.errors import VerificationFailed
from lab.quiver_core import cartan_datum, classify, coxeter_element
from lab.root_system import (
    cyclic_roots, first_imaginary_root, nu_isometry_check, positive_roots,
    real_roots_to_level, verify_lattice_presentation,
)

QUIVER = (("--quiver",), {"required": True, "help": "quiver JSON file"})
OUT = (("--out",), {"help": "write the report here instead of stdout"})
FORMAT = (("--format",), {"choices": ["json", "csv"], "help": "report format"})
CAP = (("--cap",), {"type": int, "help": "largest multiple of delta (affine quivers)"})


class Quivers(Cog):
    def __init__(self, app):
        super().__init__(app)
        self.app: LabApp = app

    @command()
    @argument(*QUIVER[0], **QUIVER[1])
    @argument(*OUT[0], **OUT[1])
    @argument(*FORMAT[0], **FORMAT[1])
    def classify(self, ctx: CustomContext):
        """ Dynkin class of the underlying graph and orientation flags """
        q = ctx.quiver
        dynkin = classify(q)
        report = dynkin.to_dict()
        report["family"] = dynkin.family
        if dynkin.is_finite or dynkin.is_affine:
            cartan = cartan_datum(q)
            report["cartan"] = [[cartan[i, j] for j in range(len(q))] for i in range(len(q))]
            report["coxeter_element"] = str(coxeter_element(q)) if not q.has_cycles() else None
        if dynkin.is_affine:
            report["delta"] = list(first_imaginary_root(q))
        ctx.emit(report)

    @command()
    @argument(*QUIVER[0], **QUIVER[1])
    @argument(*CAP[0], **CAP[1])
    @argument(*OUT[0], **OUT[1])
    @argument(*FORMAT[0], **FORMAT[1])
    @permissions.requires_family("finite", "kronecker", "cyclic", "affine")
    def roots(self, ctx: CustomContext):
        """ Positive roots; up to cap*delta on affine quivers """
        q = ctx.quiver
        dynkin = classify(q)
        if dynkin.is_finite:
            roots = [r.to_dict() for r in positive_roots(q)]
        else:
            delta = first_imaginary_root(q)
            roots = [r.to_dict() for r in real_roots_to_level(q, ctx.cap)]
            roots.extend(
                {"vector": [n * d for d in delta], "kind": "imaginary", "defect": 0}
                for n in range(1, ctx.cap + 1)
            )
            roots.sort(key=lambda r: (sum(r["vector"]), r["vector"]))
        ctx.emit({"tag": dynkin.tag, "roots": roots, "count": len(roots)})

    @command(name="cyclic-roots")
    @argument(*QUIVER[0], **QUIVER[1])
    @argument(*OUT[0], **OUT[1])
    @argument(*FORMAT[0], **FORMAT[1])
    @permissions.requires_family("affine")
    def cyclic_roots(self, ctx: CustomContext):
        """ Lowest finite Coxeter orbits of regular roots: L and N_1..N_L """
        table = cyclic_roots(ctx.quiver)
        failures = table.invariant_failures()
        ctx.emit({**table.to_dict(), "failures": failures, "passed": not failures})
        if failures:
            raise VerificationFailed({"check": "cyclic-roots", "failures": failures})

    @command(name="verify-presentation")
    @argument(*QUIVER[0], **QUIVER[1])
    @argument(*OUT[0], **OUT[1])
    @argument(*FORMAT[0], **FORMAT[1])
    @permissions.requires_family("affine")
    def verify_presentation(self, ctx: CustomContext):
        """ Lattice presentation by cyclic roots and the nu isometry """
        table = cyclic_roots(ctx.quiver)
        reports = [verify_lattice_presentation(table), nu_isometry_check(table)]
        ctx.emit({"checks": reports, "passed": all(r["passed"] for r in reports)})
        for report in reports:
            if not report["passed"]:
                raise VerificationFailed(report)


def setup(app):
    app.add_cog(Quivers(app))
