"""
qsource-lab - numerical laboratory for quantum information sources

Block densities of stationary quantum sources, their entropy rates, the
classical processes induced by measurements, typical subspaces and the
ergodicity diagnostics that tie them together.
"""

__version__ = "0.1.0"


# Lazy accessors keep ``import qsource`` free of the numerical stack.
def run_experiment(*args, **kwargs):
    from .runner import run_experiment as _real
    return _real(*args, **kwargs)


def ExperimentConfig(*args, **kwargs):
    from .config import ExperimentConfig as _real
    return _real(*args, **kwargs)


__all__ = ["run_experiment", "ExperimentConfig", "__version__"]
