from functools import wraps
from typing import TYPE_CHECKING

from lab.errors import ClassificationError
from lab.quiver_core import classify

if TYPE_CHECKING:
    from utils.default import CustomContext


def check(predicate):
    """ Run predicate(ctx) before the command; it raises when the command may not run """
    def decorator(func):
        @wraps(func)
        def wrapper(self, ctx: "CustomContext"):
            predicate(ctx)
            return func(self, ctx)
        return wrapper
    return decorator


def requires_family(*families: str):
    """ Only run the command on quivers of the given families (finite, kronecker, cyclic, affine) """
    def pred(ctx: "CustomContext"):
        dynkin = classify(ctx.quiver)
        if dynkin.family not in families:
            raise ClassificationError(
                f"{ctx.command} needs a {' or '.join(families)} quiver, got {dynkin.tag}"
            )
    return check(pred)


def requires_affine():
    return requires_family("kronecker", "cyclic", "affine")
