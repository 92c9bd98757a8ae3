"""dpwforge: CMC surfaces in R3, S3 and H3 from holomorphic potentials via loop-group splittings."""

__version__ = "0.1.0"

from . import errors  # noqa: F401
