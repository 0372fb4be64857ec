"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions or counts do not match what an operation requires."""


class UnalignableSequence(ValueError):
    """No frame of a skeleton sequence has both hip joints present."""


class IncomparablePoses(ValueError):
    """Two descriptors (or a descriptor and a sequence) share no valid limb."""


class FormatError(ValueError):
    """A file's contents do not follow its declared format."""
