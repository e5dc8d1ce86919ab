import sys

from swarm_resilience.harness.cli import main

sys.exit(main())
