"""Exception hierarchy shared by all internames components."""


class InternamesError(Exception):
    """Base class for every error raised by this package."""


class MalformedUri(InternamesError):
    pass


class DuplicateName(InternamesError):
    pass


class Unauthorized(InternamesError):
    pass


class DuplicateRecord(InternamesError):
    pass


class NotFound(InternamesError):
    pass


class NotResolvable(InternamesError):
    pass


class MalformedMessage(InternamesError):
    pass


class NoFibMatch(InternamesError):
    pass


class HopLimitExceeded(InternamesError):
    pass


class UnsupportedPair(InternamesError):
    pass


class MissingFcn(InternamesError):
    pass


class UnknownNap(InternamesError):
    pass


class NotBound(InternamesError):
    pass


class NoRoute(InternamesError):
    pass


class RealmViolation(InternamesError):
    pass


class UnknownRealm(InternamesError):
    pass


class ParseError(InternamesError):
    pass


class ValidationError(InternamesError):
    pass


class InvalidStep(InternamesError):
    pass


class AccessDenied(InternamesError):
    pass


class Unreachable(InternamesError):
    pass


class DeliveryFailed(InternamesError):
    pass
