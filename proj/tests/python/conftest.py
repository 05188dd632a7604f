import os
import sys

# ctest points this at the package staged in the build tree; an editable
# install's import hook would otherwise take precedence over sys.path.
_staged = os.environ.get("EQR_PYTHON_PATH")
if _staged:
    sys.meta_path[:] = [f for f in sys.meta_path if not type(f).__module__.startswith("_editable_")]
    sys.path.insert(0, _staged)
    for name in [m for m in sys.modules if m == "evalqreason" or m.startswith("evalqreason.")]:
        del sys.modules[name]
