"""Exception hierarchy shared across the package."""


class RamoError(Exception):
    """Base class for all errors raised by this package."""


# --- catalog ---------------------------------------------------------------

class MissingColumn(RamoError):
    def __init__(self, column: str):
        super().__init__(f"required column {column!r} not found in CSV header")
        self.column = column


class EmptyCatalog(RamoError):
    """No courses survived loading (or an empty catalog was passed downstream)."""


class MalformedCsv(RamoError):
    def __init__(self, line_number: int, detail: str = ""):
        msg = f"unparseable CSV record at line {line_number}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.line_number = line_number


# --- embedding / generation providers --------------------------------------

class ProviderError(RamoError):
    """Base for failures talking to a remote embedding/generation provider."""


class ProviderAuth(ProviderError):
    """Credential rejected by the provider."""


class ProviderRateLimit(ProviderError):
    """Provider kept rate-limiting after all retries."""


class ProviderTimeout(ProviderError):
    """Provider did not answer within the timeout after all retries."""


class EmptyReply(ProviderError):
    """Generator returned an empty reply."""


class DimensionMismatch(RamoError):
    """Vector dimensions disagree (query vs index, or provider vs pinned dim)."""


# --- vector index persistence ----------------------------------------------

class CorruptIndex(RamoError):
    """Index file is truncated, has a bad magic, or fails its checksum."""


class FormatVersionMismatch(RamoError):
    def __init__(self, found: int, supported: int):
        super().__init__(
            f"index format version {found} not supported (this build reads version {supported})"
        )
        self.found = found
        self.supported = supported


# --- prompting --------------------------------------------------------------

class EmptyQuestion(RamoError):
    """User message is empty after trimming."""


class BudgetTooSmall(RamoError):
    """Template plus question alone exceed the token budget."""


class UnknownCourseId(RamoError):
    def __init__(self, course_id: int):
        super().__init__(f"course id {course_id} not present in catalog")
        self.course_id = course_id


class TemplateInvalid(RamoError):
    """Prompt template failed validation (placeholders, fields, count)."""


# --- baseline ----------------------------------------------------------------

class NoMatch(RamoError):
    """Content-based baseline found nothing above the similarity floor.

    This is the reproduced cold-start failure mode of the traditional
    recommender: the query shares no vocabulary with any course text.
    """


# --- recommender --------------------------------------------------------------

class PipelineStageError(RamoError):
    """Provider failure wrapped with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
