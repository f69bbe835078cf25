"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: validation failures exit 1, I/O
problems exit 2 (plain OSError is used for those), verification
failures exit 3.
"""


class TreeseqError(Exception):
    pass


class ValidationError(TreeseqError):
    """Malformed input: documents, tokens, configs, conflicting corpora."""


class VerificationError(TreeseqError):
    """A self-check failed: round-trip mismatch, unparsable output."""


class IllegalTokenError(ValidationError):
    """Token rejected by the decoding automaton.

    Carries the set of grammar symbols that were legal instead.
    """

    def __init__(self, message: str, legal=frozenset()):
        super().__init__(message)
        self.legal = frozenset(legal)
