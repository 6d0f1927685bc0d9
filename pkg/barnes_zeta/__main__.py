import sys

from barnes_zeta.cli import main

if __name__ == "__main__":
    sys.exit(main())
