"""
Supergrass - Main entry point, shared by `python run.py` and `python -m supergrass`
"""

import logging
import sys
from typing import Optional, Sequence

from .utils.config import get_settings

logger = logging.getLogger(__name__)


def configure_logging() -> None:
    """Logs go to stderr; stdout is reserved for results"""
    logging.basicConfig(
        level=getattr(logging, get_settings().log_level, logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def check_dependencies() -> bool:
    """Check if required dependencies are available"""
    try:
        import numpy
        import sympy
        import lrcalc  # noqa: F401
        logger.info(f"Core dependencies found (numpy {numpy.__version__}, sympy {sympy.__version__}, lrcalc)")
        return True
    except ImportError as e:
        logger.error(f"Missing core dependency: {e}")
        logger.error("Please install requirements: pip install -r requirements.txt")
        return False


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Main entry point"""
    configure_logging()
    if not check_dependencies():
        sys.exit(1)

    from .app import dispatch

    try:
        sys.exit(dispatch(sys.argv[1:] if argv is None else list(argv)))
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        sys.exit(130)
