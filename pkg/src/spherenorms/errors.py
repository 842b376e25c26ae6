"""Exception types shared across the package."""


class ResolutionError(ValueError):
    """A grid or rule is too coarse for the scale it must resolve."""


class WindowError(ValueError):
    """An asymptotic estimate was requested outside its validity window."""


class ResourceLimitError(RuntimeError):
    """A node-count or dimension guard would be exceeded."""


class DegenerateMeasureError(RuntimeError):
    """The measure is singular on the polynomial space (mass zero somewhere it must not be)."""


class NetConstructionError(RuntimeError):
    """A covering net with the required covering radius / overlap bound could not be built."""


class EmptyIntersectionError(RuntimeError):
    """No evaluation node lies inside the requested set."""


class ConfigError(ValueError):
    """An experiment configuration failed to parse or validate."""
