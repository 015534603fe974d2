"""Exception types shared across the package."""

from __future__ import annotations


class LigforgeError(Exception):
    """Base class; the CLI maps these to exit status 2."""


class GrammarSyntaxError(LigforgeError):
    def __init__(self, message: str, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}: " if col is None else f"line {line}, column {col}: "
        super().__init__(where + message)


class NormalFormError(LigforgeError):
    """Raised by strict parsing when productions break the normal form."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {v}" for v in self.violations)
        super().__init__(
            "grammar is not in normal form (parse with relaxed=True and "
            f"normalize, or fix the productions):\n{lines}"
        )


class UnknownTokenError(LigforgeError):
    def __init__(self, token, position):
        self.token = token
        self.position = position
        super().__init__(f"input token {token!r} at position {position} is not in the grammar")


class InvalidDerivationError(LigforgeError):
    """A production sequence that is not a derivation; ``position`` indexes
    the offending step in application order, counting from 0."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"step {position}: {message}")
