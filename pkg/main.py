"""
Post-beamforming GLRT detector - Main Entry Point
"""

import os
import sys

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli.commands import main

if __name__ == "__main__":
    main()
