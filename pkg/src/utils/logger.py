"""
Logging helpers for Gadgetdict

Readable stderr logs with progress tracking, so stdout stays free for CSV and
trace output.
"""

import logging
import sys
from datetime import datetime, timedelta
from typing import Dict, Any, Optional, TextIO


class ColoredFormatter(logging.Formatter):
    """Add colors to log levels for better readability"""

    # ANSI color codes
    COLORS = {
        'DEBUG': '\033[36m',     # Cyan
        'INFO': '\033[32m',      # Green
        'WARNING': '\033[33m',   # Yellow
        'ERROR': '\033[31m',     # Red
        'CRITICAL': '\033[35m',  # Magenta
    }
    RESET = '\033[0m'
    BOLD = '\033[1m'

    def __init__(self, *args, use_color: bool = True, **kwargs):
        super().__init__(*args, **kwargs)
        self.use_color = use_color

    def format(self, record):
        levelname = record.levelname
        if self.use_color and levelname in self.COLORS:
            record.levelname = f"{self.COLORS[levelname]}{self.BOLD}{levelname}{self.RESET}"

        result = super().format(record)

        # Reset levelname for next use
        record.levelname = levelname

        return result


class ProgressTracker:
    """Track operation progress, agreement counts and ETA"""

    def __init__(self, total: int, description: str = "Processing"):
        self.total = total
        self.current = 0
        self.description = description
        self.start_time = datetime.now()
        self.agreed = 0
        self.disagreed = 0

    def update(self, agreed: bool = True, count: int = 1):
        """Record `count` processed operations"""
        self.current += count
        if agreed:
            self.agreed += count
        else:
            self.disagreed += count

    def get_progress_str(self) -> str:
        """Get formatted progress string with percentage and ETA"""
        percentage = (self.current / self.total * 100) if self.total > 0 else 0

        elapsed = (datetime.now() - self.start_time).total_seconds()
        if self.current > 0:
            rate = elapsed / self.current
            remaining = (self.total - self.current) * rate
            eta_str = f"ETA: {timedelta(seconds=int(remaining))}"
        else:
            eta_str = "ETA: calculating..."

        return f"{self.description} [{self.current}/{self.total}] {percentage:.1f}% | {eta_str}"

    def get_stats_str(self) -> str:
        """Get statistics string"""
        elapsed = (datetime.now() - self.start_time).total_seconds()
        rate = self.current / elapsed if elapsed > 0 else 0

        return (
            f"✓ Agreed: {self.agreed} | "
            f"✗ Disagreed: {self.disagreed} | "
            f"Rate: {rate:.0f} ops/sec"
        )


def setup_logger(
    name: str = 'src',
    level: int = logging.INFO,
    stream: Optional[TextIO] = None
) -> logging.Logger:
    """
    Set up a clean, readable logger

    Args:
        name: Logger name (the package root 'src' covers every module logger)
        level: Logging level
        stream: Output stream (default stderr)

    Returns:
        Configured logger
    """
    stream = stream or sys.stderr
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Remove existing handlers
    logger.handlers = []

    handler = logging.StreamHandler(stream)
    handler.setLevel(level)

    formatter = ColoredFormatter(
        fmt='%(asctime)s | %(levelname)s | %(name)s | %(message)s',
        datefmt='%H:%M:%S',
        use_color=hasattr(stream, 'isatty') and stream.isatty()
    )
    handler.setFormatter(formatter)

    logger.addHandler(handler)

    return logger


def print_header(title: str, stream: Optional[TextIO] = None):
    """Print a clear section header"""
    stream = stream or sys.stderr
    width = 70
    print("\n" + "=" * width, file=stream)
    print(f"  {title}", file=stream)
    print("=" * width + "\n", file=stream)


def print_summary(stats: Dict[str, Any], title: str = "SUMMARY", stream: Optional[TextIO] = None):
    """Print final summary with statistics"""
    stream = stream or sys.stdout
    width = 70
    print("\n" + "=" * width, file=stream)
    print(f"  {title}", file=stream)
    print("=" * width, file=stream)

    for key, value in stats.items():
        print(f"  {key:30s}: {value}", file=stream)

    print("=" * width + "\n", file=stream)
