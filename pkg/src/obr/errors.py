"""Exception hierarchy.

Format errors map to CLI exit status 1, recognition errors to exit status 2.
"""


class ObrError(Exception):
    """Base class for all package errors."""


class FormatError(ObrError):
    """Input could not be parsed."""


class MalformedHeader(FormatError):
    pass


class TruncatedBody(FormatError):
    pass


class TableFormatError(FormatError):
    pass


class RecognitionError(ObrError):
    """The pipeline ran but could not recognize the page."""


class DegenerateHistogram(RecognitionError):
    pass


class InsufficientDots(RecognitionError):
    pass


class NoLatticeFit(RecognitionError):
    pass


class UnencodableGrapheme(ObrError):
    def __init__(self, grapheme, position):
        self.grapheme = grapheme
        self.position = position
        super().__init__(f"cannot encode {grapheme!r} at position {position}")


class EmptyPage(ObrError):
    pass
