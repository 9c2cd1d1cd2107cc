"""Exception hierarchy shared by all modules."""


class FittedRKError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(FittedRKError):
    """A numerical failure (CLI exit code 2)."""


class InputError(FittedRKError):
    """Bad user input: parse failures, malformed problem files (CLI exit code 1)."""


class DomainError(FittedRKError, ValueError):
    """Argument outside the domain of a function or operation."""


class SingularSystem(NumericalError):
    """The kernel constraint system is rank deficient."""


class CrossCheckFailure(NumericalError):
    """Two independent computations of the same quantity disagree."""


class Breakdown(NumericalError):
    """Gram-Schmidt pivot collapsed; the collocation set is nearly dependent."""

    def __init__(self, index, pivot, largest):
        self.index = index
        self.pivot = pivot
        self.largest = largest
        super().__init__(
            f"Gram-Schmidt breakdown at basis index {index}: pivot {pivot:.3e} "
            f"below 1e-12 x largest pivot {largest:.3e}; reduce n"
        )


class BCViolation(FittedRKError, ValueError):
    """A function expected to satisfy the periodic conditions does not."""


class NonFiniteF(NumericalError):
    """The right-hand side F evaluated to a non-finite value during a sweep."""

    def __init__(self, k, args, cause=None):
        self.k = k
        self.args_ = tuple(float(a) for a in args)
        shown = ", ".join(f"{a:.17g}" for a in self.args_)
        msg = f"F is not finite at node k={k} with (t, y, y', y'') = ({shown})"
        if cause is not None:
            msg += f" ({cause})"
        super().__init__(msg)


class NoConvergence(NumericalError):
    """Outer iteration hit its pass limit before reaching the tolerance."""

    def __init__(self, last, history):
        self.last = last
        self.history = list(history)
        super().__init__(
            f"no convergence after {len(self.history)} passes; "
            f"last change {self.history[-1]:.3e}"
        )


class ParseError(InputError, ValueError):
    """Malformed expression text."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnboundVariable(InputError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable {name!r}")

    def __str__(self):
        return self.args[0]


class Unsupported(FittedRKError):
    """Operation not supported for this expression form."""


class ProblemFileError(InputError):
    """Malformed problem file."""


def add_context(exc: BaseException, note: str) -> BaseException:
    """Append `note` to the exception message in place and return it."""
    if exc.args and isinstance(exc.args[0], str):
        exc.args = (f"{exc.args[0]} [{note}]",) + exc.args[1:]
    else:
        exc.args = exc.args + (note,)
    exc.context_note = note
    return exc
