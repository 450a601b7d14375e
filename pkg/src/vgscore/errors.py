"""Error types raised across the package.

Every domain error derives from VGError so the CLI can map any of them
to a single diagnostic line and exit code 1.
"""


class VGError(Exception):
    """Base class for all domain errors."""


class MissingRatings(VGError):
    pass


class InvalidWeights(VGError):
    pass


class InvalidScore(VGError):
    pass


class MalformedManifest(VGError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class DuplicateId(VGError):
    pass


class EmptyDataset(VGError):
    pass


class UnsupportedFormat(VGError):
    pass


class CorruptFeatureFile(VGError):
    pass


class CorruptCheckpoint(VGError):
    pass


class DimensionMismatch(VGError):
    pass


class ShapeError(VGError):
    def __init__(self, expected, got):
        super().__init__(f"expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class ClassOutOfRange(VGError):
    pass


class ConfigError(VGError):
    pass


class ModalityError(VGError):
    pass


class EmptyTrailer(VGError):
    pass


class FeatureUnavailable(VGError):
    def __init__(self, game_id: str, detail: str = ""):
        msg = game_id if not detail else f"{game_id}: {detail}"
        super().__init__(msg)
        self.game_id = game_id


class TooFewSamples(VGError):
    pass
