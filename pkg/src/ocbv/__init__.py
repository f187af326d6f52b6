"""Open call-by-value calculi: fireballs, value substitution, shuffling, sequents."""

import sys

# Terms are nested dataclasses walked recursively; long derivations can get deep.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)
