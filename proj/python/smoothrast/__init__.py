"""Smooth differentiable triangle rasterizer."""

try:
    from ._smoothrast import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _smoothrast import *  # noqa: F401,F403  (in-tree build on sys.path)
