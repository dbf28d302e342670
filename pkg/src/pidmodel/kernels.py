"""Select the cohort integrator.

The compiled ``_ckernel`` is used when importable; set ``PIDMODEL_PURE_PYTHON=1``
to force the pure-Python fallback.
"""
import os

from . import _pykernel

BACKEND = "python"
evolve_cohorts = _pykernel.evolve_cohorts

if not os.environ.get("PIDMODEL_PURE_PYTHON"):
    try:
        from . import _ckernel
    except ImportError:
        pass
    else:
        evolve_cohorts = _ckernel.evolve_cohorts
        BACKEND = "cython"

python_evolve_cohorts = _pykernel.evolve_cohorts
