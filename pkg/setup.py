"""Build script: optionally compiles the hot kernel with Cython.

The interpreter kernel (term representation, unification, substitution
composition) lives in src/sibylog/_kernel.py as plain Python. At build time we
copy it to _kernel_c.py and compile that copy into an extension module; at
import time sibylog._core prefers the compiled module and falls back to the
interpreted one. A failed compile therefore only costs speed, never features,
so every compilation step below is best-effort.
"""

import os
import shutil

from setuptools import setup

os.chdir(os.path.dirname(os.path.abspath(__file__)) or ".")
PURE = os.path.join("src", "sibylog", "_kernel.py")
TWIN = os.path.join("src", "sibylog", "_kernel_c.py")

ext_modules = []
try:
    from Cython.Build import cythonize

    if os.path.exists(PURE):
        same = os.path.exists(TWIN) and open(TWIN, "rb").read() == open(PURE, "rb").read()
        if not same:
            shutil.copyfile(PURE, TWIN)
            c_file = os.path.join("src", "sibylog", "_kernel_c.c")
            if os.path.exists(c_file):
                os.remove(c_file)  # force regeneration from the new source
        ext_modules = cythonize(
            [TWIN],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"sibylog: skipping Cython kernel build ({exc}); using pure-Python kernel")
    ext_modules = []

setup(ext_modules=ext_modules)
