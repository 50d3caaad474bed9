"""The one- and two-parameter map families used by the sweeps.

Every family starts from the maximally entangled initial state on C, E and
a (possibly decohered) partial-swap gate:

* delay:    theta fixed, overlap q swept, no dephasing;
* theta_p:  gate angle theta and dephasing strength p swept, axes fixed
            at (x, y, z) for the wires (E, D, B);
* eta:      full dephasing, axes rotated from (x, y, z) to (z, z, z).
"""

from __future__ import annotations

from .model import (BlochVector, CausalMap, FragmentSpec, X_AXIS, Y_AXIS,
                    Z_AXIS, build_causal_map, delay_gate, eta_axes, phi_plus)

#: dephasing axes (n_E, n_D, n_B) shared by the delay and theta_p families
DEFAULT_AXES: tuple[BlochVector, BlochVector, BlochVector] = (X_AXIS, Y_AXIS, Z_AXIS)


def family_fragment(theta: float, p: float = 0.0, q: float = 1.0,
                    axes: tuple[BlochVector, BlochVector, BlochVector] | None = None,
                    ) -> FragmentSpec:
    n_e, n_d, n_b = axes if axes is not None else DEFAULT_AXES
    pre = {"D": (n_d, p), "E": (n_e, p)} if p > 0 else {}
    post = {"B": (n_b, p)} if p > 0 else {}
    return FragmentSpec(initial_state=phi_plus(), gate=delay_gate(theta, q),
                        pre_dephasing=pre, post_dephasing=post)


def family_map(theta: float, p: float = 0.0, q: float = 1.0,
               axes: tuple[BlochVector, BlochVector, BlochVector] | None = None,
               eta: float | None = None) -> CausalMap:
    """Build one member of the swept families.

    eta, when given, overrides axes with the rotated dephasing triple.
    """
    if eta is not None:
        axes = eta_axes(eta)
    return build_causal_map(family_fragment(theta, p=p, q=q, axes=axes))
