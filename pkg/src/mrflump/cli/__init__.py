"""Instance files, fixtures, random instances and the ``mrflump`` command."""

from .fixtures import builtin_fixture
from .generate import random_instance
from .instance import Instance, InstanceError, parse_instance, serialize_instance

__all__ = ["Instance", "InstanceError", "builtin_fixture", "parse_instance", "random_instance", "serialize_instance"]
