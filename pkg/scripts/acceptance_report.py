#!/usr/bin/env python3
"""Run the acceptance criteria and show the one-line verdicts."""

import subprocess
import sys


def main():
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "tests/test_acceptance.py", "-s", "-q"],
        capture_output=True, text=True)
    for line in proc.stdout.splitlines():
        if "ACCEPTANCE" in line or "passed" in line or "failed" in line:
            print(line.lstrip("."))
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
