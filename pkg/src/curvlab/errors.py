"""Exception taxonomy shared by all curvlab modules.

Every exception carries a stable ``code`` string so CLI reports and JSON
verdicts can name failures without depending on Python class names.
"""


class CurvlabError(Exception):
    code = "CURVLAB_ERROR"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class MissingExponent(CurvlabError):
    code = "MISSING_EXPONENT"


class NonintegrableWeight(CurvlabError):
    code = "NONINTEGRABLE_WEIGHT"


class DegenerateQuotient(CurvlabError):
    code = "DEGENERATE_QUOTIENT"


class UnknownFamily(CurvlabError):
    code = "UNKNOWN_FAMILY"


class WrongRegime(CurvlabError):
    code = "WRONG_REGIME"


class IrregularLevel(CurvlabError):
    code = "IRREGULAR_LEVEL"


class BadEpsilon(CurvlabError):
    code = "BAD_EPSILON"


class ShootDiverged(CurvlabError):
    code = "SHOOT_DIVERGED"


class NoSolutionAtM(CurvlabError):
    code = "NO_SOLUTION_AT_M"


class EigFailed(CurvlabError):
    code = "EIG_FAILED"


class NotSemistable(CurvlabError):
    code = "NOT_SEMISTABLE"


class InconclusiveBranch(CurvlabError):
    code = "INCONCLUSIVE_BRANCH"
