"""
Pipeline Package
Command-line front end of the verifier.
"""

from .main import main

__all__ = ['main']
