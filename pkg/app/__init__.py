"""
Tight IC-POVM toolkit: construction, optimization, verification and entanglement
profiling of tight informationally complete measurements on multipartite qudits
"""
__title__ = "tight-povm-lab"
__version__ = "1.0.0"

# Bumped whenever a report or file layout changes shape
SCHEMA_VERSION = 1
