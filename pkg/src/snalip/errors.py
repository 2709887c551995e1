"""Exception hierarchy.

The CLI maps these onto exit codes: input and precondition problems exit
with 2, internal consistency failures with 3.
"""


class SnalipError(Exception):
    exit_code = 2


class InputError(SnalipError, ValueError):
    """Malformed input: bad matrix, unknown point, unparsable file."""


class PreconditionError(InputError):
    """Input is well formed but violates an operation's precondition."""


class ContractError(PreconditionError):
    """A checked assertion was called outside its contract."""


class NotNormalizedError(PreconditionError):
    def __init__(self, member, norm):
        self.member = member
        self.norm = norm
        super().__init__(f"member {member!r} has Lipschitz norm {norm}, expected 1")


class UndefinedNormError(InputError):
    pass


class HierarchyError(PreconditionError):
    pass


class InsufficientSequenceError(PreconditionError):
    def __init__(self, found, requested):
        self.found = found
        self.requested = requested
        super().__init__(
            f"candidate sequence exhausted after {found} of {requested} picks"
        )


class SizeError(PreconditionError):
    pass


class InternalConsistencyError(SnalipError, AssertionError):
    exit_code = 3
