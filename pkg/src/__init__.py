"""
Subharmonic Bounds Verifier
Numerical certification of lower bounds for subharmonic functions through
Harnack distances, Green functions and Hausdorff contents.
"""

__version__ = "1.0.0"
