"""Exception types shared across the package."""


class PaperTreeError(Exception):
    """Base class for all papertree errors."""


class EmptyDocument(PaperTreeError):
    """The input had no text content at all."""


class UnsupportedMarkup(PaperTreeError):
    """The input does not look like the requested markup format."""


class EmptyTree(PaperTreeError):
    """No summarizable blocks remain after filtering."""


class UnknownNode(PaperTreeError):
    """A node id does not resolve in the tree."""


class NotASection(PaperTreeError):
    """The operation requires a section node."""


class MissingSlot(PaperTreeError):
    """A prompt template lacks a required slot."""


class MalformedResponse(PaperTreeError):
    """No parsable summary object in a backend response."""


class MissingField(PaperTreeError):
    """A summary point lacks its point or evidence field."""


class RetryNeeded(PaperTreeError):
    """A backend returned fewer than two usable points."""


class BackendUnavailable(PaperTreeError):
    """The summarizer backend failed after exhausting its retry budget."""


class MissingChildSummary(PaperTreeError):
    """A section was summarized before one of its children."""


class ContentTooShort(PaperTreeError):
    """The content has no sentence to summarize."""


class InvalidDocument(PaperTreeError):
    """A document failed validation before saving."""


class SchemaVersionMismatch(PaperTreeError):
    """A stored document uses an incompatible schema version."""


class CorruptDocument(PaperTreeError):
    """A stored document could not be parsed or failed its invariants."""
