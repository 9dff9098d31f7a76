class QuiverLabError(Exception):
    """ Base class for every error raised by the lab package """


class ParseError(QuiverLabError):
    """ Malformed quiver, representation or job file """


class QuiverError(QuiverLabError):
    """ Structural problem with a quiver (unknown vertex, bad loop, cycle) """


class ClassificationError(QuiverLabError):
    """ Operation needs a Dynkin class the quiver does not have """


class ShapeError(QuiverLabError):
    """ Dimension vector or matrix shape does not fit the quiver """


class NonNilpotent(QuiverLabError):
    """ Representation is not nilpotent """


class UnsupportedFamily(QuiverLabError):
    """ No canonical indecomposables are known for this quiver or label """


class CapExceeded(QuiverLabError):
    """ A configured size limit would be crossed """


class OracleError(QuiverLabError):
    """ The counting oracle produced inconsistent data """


class InterpolationError(OracleError):
    """ Point counts are not a polynomial of the expected degree """


class AssumptionViolated(QuiverLabError):
    """ A standing hypothesis of a construction does not hold """

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {detail}" if detail else hypothesis)


class VerificationFailed(QuiverLabError):
    """ A verification report contains failures """

    def __init__(self, report: dict):
        self.report = report
        failures = report.get("failures", [])
        super().__init__(f"{len(failures)} check(s) failed in {report.get('check', 'report')}")
