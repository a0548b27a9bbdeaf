"""Exception families. Each carries the CLI exit code used for it."""


class InpaintError(Exception):
    exit_code = 1


class InvalidArgument(InpaintError, ValueError):
    exit_code = 2


class NotAFrameError(InpaintError):
    exit_code = 3


class EmptyNeighborhoodError(InpaintError):
    exit_code = 4


class PlacementError(InpaintError):
    exit_code = 5


class GapTooLongError(InpaintError):
    exit_code = 6


class UndefinedReferenceError(InpaintError, ValueError):
    exit_code = 7


class WavFormatError(InpaintError):
    exit_code = 8
