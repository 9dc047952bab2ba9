"""Component network meta-analysis: Python interface.

Thin wrappers over the compiled ``_core`` module. Structured results come
back as plain dicts parsed from the same JSON documents the command-line
tool writes, so both interfaces always agree byte for byte.
"""

import json as _json

try:
    from . import _core as _impl
except ImportError:
    # When running against a plain CMake build tree, _core sits on
    # PYTHONPATH as a top-level module instead of inside the package.
    import _core as _impl  # type: ignore[no-redef]

InputError = _impl.InputError
ModelError = _impl.ModelError
Network = _impl.Network
NumericalError = _impl.NumericalError
__version__ = _impl.__version__

__all__ = [
    "InputError",
    "ModelError",
    "Network",
    "NumericalError",
    "__version__",
    "apply_design",
    "disconnected_designs",
    "fit",
    "load_network",
    "select",
    "simulate",
]


def load_network(path):
    """Read a contrast- or arm-level CSV file into a :class:`Network`."""
    with open(path, "r", encoding="utf-8") as handle:
        return Network.from_csv(handle.read(), str(path))


def fit(net, reference, model="nma", interactions=()):
    """Fit a model and return its report as a dict.

    ``model`` is ``"nma"`` for the standard network meta-analysis or
    ``"additive"`` for the component model; ``interactions`` adds named
    interaction terms like ``"A*B"`` to the additive model.
    """
    return _json.loads(_impl.fit_json(net, reference, model, list(interactions)))


def select(net, reference, threshold=0.157, max_cardinality=-1):
    """Forward interaction selection; returns the full trace as a dict."""
    return _json.loads(_impl.select_json(net, reference, threshold, max_cardinality))


def disconnected_designs(net, reference, force=False):
    """Every valid disconnected design of the network, as a dict."""
    return _json.loads(_impl.designs_json(net, reference, force))


def apply_design(net, reference, design_id, force=False):
    """The network with the given design's bridging studies removed."""
    return _impl.apply_design(net, reference, design_id, force)


def simulate(config=None, jobs=1, **overrides):
    """Run one simulation cell and return its summary as a dict.

    ``config`` is a dict with any of scenario, tau2, runs, seed, mode plus
    optional overrides; keyword arguments are merged on top of it.
    """
    merged = dict(config or {})
    merged.update(overrides)
    return _json.loads(_impl.simulate_json(_json.dumps(merged), jobs))
