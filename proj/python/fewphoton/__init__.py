"""One- and two-photon transport through Bose-Hubbard graphs with chiral channels.

Energies are in units of the reference coupling rate. Model methods take
absolute carrier frequencies ``omega0``; sweeps take detunings measured from
``carrier_base``.
"""

from ._fewphoton import (
    FewPhotonError,
    Graph,
    Model,
    Scenario,
    Sweep,
    list_presets,
    load_scenario,
    parse_scenario,
    preset,
    preset_names,
    reference,
)

__all__ = [
    "FewPhotonError",
    "Graph",
    "Model",
    "Scenario",
    "Sweep",
    "list_presets",
    "load_scenario",
    "parse_scenario",
    "preset",
    "preset_names",
    "reference",
]
