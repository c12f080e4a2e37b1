"""Modulo scheduling with joint warp specialization.

Problems and solutions are exchanged as the same JSON documents the
``weftsched`` command line uses; query results come back as plain dicts.
"""

try:
    from ._weftsched import (
        codegen,
        dot,
        gantt,
        joint,
        normalize,
        schedule,
        simulate,
        validate,
    )
except ImportError:  # in-tree builds put the extension next to the package
    from _weftsched import (
        codegen,
        dot,
        gantt,
        joint,
        normalize,
        schedule,
        simulate,
        validate,
    )

__all__ = [
    "codegen",
    "dot",
    "gantt",
    "joint",
    "normalize",
    "schedule",
    "simulate",
    "validate",
]
