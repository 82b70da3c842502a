"""Exception type shared by all chebolab modules."""


class LabError(ValueError):
    """Raised on a contract violation.

    ``code`` is a stable machine-readable tag such as ``"NON_ASSOCIATIVE"``
    or ``"S_OUT_OF_RANGE"``; the message is for humans.
    """

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
