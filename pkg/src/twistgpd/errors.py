"""Exception hierarchy shared by every module."""


class TwistError(Exception):
    """Base class; ``code`` is the CLI exit status used when it escapes."""

    code = 2

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def record(self):
        return {"error": type(self).__name__, "message": str(self), **_jsonable(self.context)}


def _jsonable(ctx):
    out = {}
    for k, v in ctx.items():
        out[k] = v if isinstance(v, (int, float, str, bool, type(None))) else repr(v)
    return out


class MalformedSpec(TwistError):
    code = 4


class StructureError(TwistError):
    """A groupoid axiom fails; ``context['witness']`` names the offending arrows."""


class NotComposable(TwistError):
    pass


class UnknownArrow(TwistError):
    code = 4


class EnumerationTruncated(TwistError):
    pass


class CocycleViolation(TwistError):
    pass


class IncompatibleVariant(TwistError):
    pass


class IncompatibleDenominator(TwistError):
    pass


class ModelMismatch(TwistError):
    pass


class BundleIncompatible(TwistError):
    pass


class NotInterior(TwistError):
    pass


class UnsupportedModel(TwistError):
    pass


class ConvergenceFailure(TwistError):
    def __init__(self, message, lower=None, upper=None, **context):
        super().__init__(message, lower=lower, upper=upper, **context)
        self.lower = lower
        self.upper = upper


class NumericalRankAmbiguity(TwistError):
    pass


class ParseError(TwistError):
    code = 4
