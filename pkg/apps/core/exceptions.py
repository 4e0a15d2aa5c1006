"""
Error hierarchy shared by every WSFL app.

Commands map these onto exit codes: validation problems exit with 1,
I/O and parse problems with 2.
"""


class WsflError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InvalidInputError(WsflError, ValueError):
    """An argument or record violates a documented precondition."""


class DegenerateModelError(WsflError):
    """A model cannot be fitted from the data it was given."""


class FormatError(WsflError):
    """A file could not be parsed.

    ``offset`` is the byte offset for binary containers, ``line`` the
    1-based line number for JSON-lines files.
    """

    exit_code = 2

    def __init__(self, message, path=None, offset=None, line=None):
        self.path = path
        self.offset = offset
        self.line = line
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f'byte offset {offset}')
        if line is not None:
            where.append(f'line {line}')
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
