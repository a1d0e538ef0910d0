import sys

from latinforge.cli import main

sys.exit(main())
