import os
import sys

# allow running the tests from a fresh checkout without installing
try:
    import solsurf  # noqa: F401
except ImportError:
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
