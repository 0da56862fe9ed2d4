#!/usr/bin/env python3
"""Run the acceptance suite and print one line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-rN", "--no-header", str(ROOT / "tests" / "test_acceptance.py")],
        capture_output=True, text=True, cwd=ROOT,
    )
    lines = [l for l in proc.stdout.splitlines() if l.startswith("criterion")]
    # lines appear both in captured output and in the summary
    for line in sorted(set(lines)):
        print(line)
    sys.exit(proc.returncode)
