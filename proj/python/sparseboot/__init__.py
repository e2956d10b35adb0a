"""Sparse recovery from bootstrap samples: JOBS, Bagging, Bolasso and l1."""

from ._sparseboot import *  # noqa: F401,F403
from ._sparseboot import __version__  # noqa: F401
