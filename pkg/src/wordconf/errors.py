"""Exception types shared across the toolkit.

Each class carries a short ``category`` used by the command line front-end
to report failures on a single machine-parsable line.
"""


class WordconfError(Exception):
    category = "error"


class FormatError(WordconfError):
    """A file could not be parsed."""

    category = "format"

    def __init__(self, message, path=None, lineno=None):
        where = ""
        if path is not None:
            where = str(path)
            if lineno is not None:
                where += f":{lineno}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.lineno = lineno


class AlignmentError(WordconfError):
    """Parallel inputs (bitext sides, labels vs hypotheses) do not line up."""

    category = "alignment"


class ModeError(WordconfError):
    """An intra-lingual object was given where an inter-lingual one is required, or vice versa."""

    category = "mode"
