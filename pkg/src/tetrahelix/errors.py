"""Exception types raised by the tetrahelix package."""


class TetrahelixError(Exception):
    """Base class for geometry errors (CLI exit code 3)."""


class DegenerateFace(TetrahelixError):
    pass


class SelfCoincidence(TetrahelixError):
    pass


class DegenerateConfiguration(TetrahelixError):
    pass


class SeamMismatch(TetrahelixError):
    pass


class NotPeriodic(TetrahelixError):
    pass


class RankDeficient(TetrahelixError):
    pass


class TranscriptionMismatch(TetrahelixError):
    """A fixture value disagrees with the value recomputed from geometry."""

    def __init__(self, item, deviation):
        self.item = item
        self.deviation = deviation
        super().__init__(f"fixture {item!r} deviates by {deviation:.3e}")
