"""Exception hierarchy shared across the library and the CLI exit codes."""


class StructureError(ValueError):
    """Malformed input: dimension mismatch, non-rational coefficient, bad file.

    Distinct from an axiom violation, which is a well-formed algebra failing
    a Lie-algebra axiom and is reported, not raised.
    """


class UnsupportedStepError(StructureError):
    """Group calculus restricted to 2-step algebras."""


class IdentityError(AssertionError):
    """An exact operator identity failed; carries a witness element."""

    def __init__(self, identity, witness=None, detail=""):
        self.identity = identity
        self.witness = witness
        self.detail = detail
        msg = f"identity failed: {identity}"
        if witness is not None:
            msg += f" (witness: {witness})"
        if detail:
            msg += f" -- {detail}"
        super().__init__(msg)


class BudgetExceededError(RuntimeError):
    """Resource budget (wall clock or monomial count) exhausted."""

    def __init__(self, reason, partial=None):
        self.reason = reason
        self.partial = partial
        super().__init__(reason)
