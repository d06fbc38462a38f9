"""
Shared modules for entbounds

Cross-cutting helpers used by the library, the CLI and the tests.
"""

from entbounds.shared.logging_config import configure_logging

__all__ = ["configure_logging"]
