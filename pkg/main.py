#!/usr/bin/env python3
"""
Januarial Toolkit
Builds coset diagrams of triangle-group actions with exactly two xy-faces,
embeds them and classifies their genus data.

Usage:
    python main.py analyze --x '(1,5)(3,4)' --y '(1,2,3)(4,5,6)'
    python main.py hecke --p 17 --k 8 --theta 16 --b 8
    python main.py family --k 5
    python main.py census --p-max 17 --k-max 8 --table
    python main.py verify --report report.json
"""

import sys
import os

# Add the current directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli.commands import run


if __name__ == "__main__":
    run()
