"""
File system utility functions.
"""

import os
from pathlib import Path
from typing import Union


def get_file_size_mb(path: Path) -> float:
    """Get file size in megabytes.

    Args:
        path: Path to the file

    Returns:
        float: File size in megabytes
    """
    return path.stat().st_size / (1024 * 1024)


def create_directories(out_dir: Union[str, Path]) -> Path:
    """Create the output directory with proper error handling."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except (PermissionError, OSError) as e:
        raise RuntimeError(f"Failed to create output directory {out_dir}: {e}")
    return out_dir


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write text through a temp file and an atomic rename.

    Args:
        path: Destination file
        text: Full file contents
    """
    path = Path(path)
    temp_file = path.with_suffix(path.suffix + '.tmp')
    with open(temp_file, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    temp_file.replace(path)
