"""Shared random generators for the test modules.

The parameter dicts produced here are deliberately framework-neutral so
the same draw can drive both the package pipeline and the straight-line
oracle in oracle.py.
"""

import numpy as np

from causalmaps import BlochVector, FragmentSpec, delay_gate


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_axis(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_fragment_params(rng):
    params = {
        "rho_ce": random_density(rng, 4),
        "theta": float(rng.uniform(0, np.pi)),
        "q": float(rng.uniform(0, 1)),
        "pre_d": None,
        "pre_e": None,
        "post_b": None,
    }
    for key in ("pre_d", "pre_e", "post_b"):
        if rng.uniform() < 0.7:
            params[key] = (random_axis(rng), float(rng.uniform(0, 1)))
    return params


def as_fragment(params):
    """Package-side FragmentSpec for a parameter draw."""
    pre = {}
    post = {}
    for key, wire, target in (("pre_d", "D", pre), ("pre_e", "E", pre),
                              ("post_b", "B", post)):
        if params[key] is not None:
            axis, p = params[key]
            target[wire] = (BlochVector.normalized(*axis), p)
    return FragmentSpec(initial_state=params["rho_ce"],
                        gate=delay_gate(params["theta"], params["q"]),
                        pre_dephasing=pre, post_dephasing=post)
