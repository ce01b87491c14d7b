"""Process-level numerical backend configuration.

Importing this module (before any other jax use) switches jax to 64-bit
floats and applies the GMQ_THREADS parallelism cap to the numerical
backends. All fit arithmetic must run in float64.
"""

import os

_threads = os.environ.get("GMQ_THREADS")
if _threads:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, _threads)
    if _threads.strip() == "1":
        flags = os.environ.get("XLA_FLAGS", "")
        if "xla_cpu_multi_thread_eigen" not in flags:
            os.environ["XLA_FLAGS"] = (
                flags + " --xla_cpu_multi_thread_eigen=false"
            ).strip()

import jax

jax.config.update("jax_enable_x64", True)
