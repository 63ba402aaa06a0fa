#!/usr/bin/env python3
"""
Farey spectral toolkit launcher
"""

import os
import sys

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from farey_spectra.cli import run  # noqa: E402


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
