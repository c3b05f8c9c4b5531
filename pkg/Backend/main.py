import sys
from pathlib import Path

# Add parent directory to path so we can import the engine module
sys.path.insert(0, str(Path(__file__).parent.parent))

from Backend.cli import cli

if __name__ == "__main__":
    cli()
