"""Exception types raised across the package."""


class GRFError(Exception):
    pass


class InvalidParameterError(GRFError, ValueError):
    pass


class GroupAxiomError(InvalidParameterError):
    """A Cayley table failed one of the group axioms.

    ``axiom`` names the first axiom that was violated.
    """

    def __init__(self, axiom: str, detail: str = ""):
        self.axiom = axiom
        msg = f"group axiom violated: {axiom}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class SpecSyntaxError(InvalidParameterError):
    pass


class IncompatibleOperandsError(GRFError, ValueError):
    pass


class UnsupportedModeError(GRFError):
    pass


class WitnessUndefinedError(GRFError):
    pass


class DivergenceError(GRFError, ArithmeticError):
    def __init__(self, step: int, detail: str = "non-finite state"):
        self.step = step
        super().__init__(f"{detail} at step {step}")
