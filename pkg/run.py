#!/usr/bin/env python3
"""
Supergrass - Main entry point
Run this script with a subcommand, e.g. `python run.py betti --n 3 --m 2 --t 1`
"""

from supergrass.main import main

if __name__ == "__main__":
    main()
