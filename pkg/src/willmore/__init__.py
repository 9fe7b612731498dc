"""Synthesis of totally isotropic Willmore two-spheres and their adjoints.

The pipeline goes: normalized potential -> block-graded nilpotent form ->
holomorphic frame integration -> explicit loop-group factorization ->
surface pair extraction, with an exact Gaussian-rational path alongside a
floating path.
"""

__version__ = "0.1.0"
