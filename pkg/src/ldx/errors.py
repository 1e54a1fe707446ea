"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can map
failures onto exit codes without string matching.
"""


class LdxError(Exception):
    code = "E_INTERNAL"


class ExprSyntaxError(LdxError, SyntaxError):
    """Malformed expression text.

    ``offset`` is the 0-based character position of the offending token and
    ``expected`` the set of token kinds that would have been accepted there.
    """

    code = "E_SYNTAX"

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = frozenset(expected)


class UnknownIdentifier(LdxError):
    code = "E_SYNTAX"

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class DomainError(LdxError, ArithmeticError):
    code = "E_DOMAIN"


class IrregularCurve(LdxError):
    code = "E_REGIME"


class NotSpacelikeHypersurface(LdxError):
    code = "E_REGIME"


class BadDirectNormal(LdxError):
    code = "E_REGIME"


class FrameDegenerate(LdxError):
    code = "E_REGIME"


class BadDirection(LdxError, ValueError):
    code = "E_REGIME"


class WrongRegime(LdxError):
    code = "E_REGIME"


class DegenerateAssumption(LdxError):
    code = "E_REGIME"


class NoRealTheta(LdxError):
    code = "E_REGIME"


class ZeroVector(LdxError, ValueError):
    code = "E_DOMAIN"


class ConfigError(LdxError):
    code = "E_CONFIG"
