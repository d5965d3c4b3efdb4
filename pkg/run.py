# run.py

import sys

from dotenv import load_dotenv

from ccthrust import create_services
from ccthrust.cli import main
from ccthrust.config import get_config

# 1. Load environment variables (CCTHRUST_ENV, CCTHRUST_LOG_LEVEL, ...)
load_dotenv()

# 2. Pick the configuration and build the services from it
Config = get_config()
print(f"🔧 ccthrust running with {Config.__name__}", file=sys.stderr)

# 3. Entry point
if __name__ == "__main__":
    sys.exit(main(sys.argv[1:], services=create_services(Config)))
