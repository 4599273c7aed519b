"""Entanglement distribution through a quantum switch, and teleportation over the result."""

__version__ = "0.1.0"

from .channels import (  # noqa: E402
    FlipParams,
    KrausChannel,
    apply,
    binary_entropy,
    bit_flip,
    bottleneck_bound,
    compose_sequential,
    extend_to_carrier,
    flip_capacity,
    phase_flip,
)
from .fidelity import (  # noqa: E402
    QuadratureSpec,
    avg_fidelity_numeric,
    classical_threshold,
    conditional_fidelity,
    f_ct_closed,
    f_qs_closed,
    gain_ratio,
)
from .qmat import BlochAngles, bell_state, partial_trace, tensor, validate_density  # noqa: E402
from .switch import (  # noqa: E402
    ControlQubit,
    correct_minus,
    distribute_ct,
    distribute_qs,
    herald,
    switch_apply_pair,
    switch_apply_single,
    switch_kraus,
)
from .teleport import bob_state_closed_form, split_blocks, teleport_circuit  # noqa: E402
