# ============================================================
# foliation_kit/errors.py — Exception Hierarchy
# ============================================================
# Library code raises these; engine.run() turns them into
# report blocks and process exit codes:
#
#   InputError            → 2   (bad file, bad text, bad degrees)
#   GenericityError       → 1   (input violates the genericity conditions)
#   VerificationError     → 1   (an asserted identity failed)
#   EscalationCapReached  → 3   (ansatz / continuation budget exhausted)
#   NumericFailure        → 3
#
# InputError is also a ValueError and the budget errors are
# RuntimeErrors, so callers that only know the builtin
# "validation vs execution" split keep working.
# ============================================================


class FoliationKitError(Exception):
    """Base class. `details` is copied verbatim into the report block."""

    exit_code = 1

    def __init__(self, message, details=None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})


class InputError(FoliationKitError, ValueError):
    exit_code = 2


class ParseError(InputError):
    """Polynomial text rejected by the grammar."""

    def __init__(self, message, text='', position=0):
        super().__init__(
            f"{message} at position {position}",
            {'text': text, 'position': position},
        )
        self.position = position


class SchemaError(InputError):
    pass


class DegreeError(InputError):
    pass


class GenericityError(FoliationKitError):
    exit_code = 1


class VerificationError(FoliationKitError):
    exit_code = 1


class EscalationCapReached(FoliationKitError, RuntimeError):
    exit_code = 3


class NumericFailure(FoliationKitError, RuntimeError):
    exit_code = 3
