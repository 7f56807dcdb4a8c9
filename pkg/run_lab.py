import sys
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent
sys.path.append(str(project_root))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
