"""Shared test configuration."""

from hypothesis import settings

# Field arithmetic over numpy arrays is slow on first call; timing is not under test.
settings.register_profile("default", deadline=None)
settings.load_profile("default")
