"""Exception types shared across the package.

The split matters for the CLI exit-code contract: configuration and usage
problems (``ValueError``, ``NoisyEngineError``, bad JSON) map to exit 2,
while runtime engine failures (``EngineError`` and subclasses) map to exit 3.
"""


class EngineError(RuntimeError):
    """A computation engine could not produce a result."""


class OracleScaleError(EngineError):
    """Brute-force pair summation refused: occupied-cell count exceeds the guard."""


class ResolutionError(EngineError):
    """Rasterization spacing is too coarse for the domain's smallest feature."""


class NoisyEngineError(ValueError):
    """A statistically noisy engine was asked for a derivative order it cannot support."""
