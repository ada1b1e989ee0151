"""trimersense: a numerical laboratory for the frustrated Kitaev-trimer
threshold ("mousetrap") sensor.

Exact time-ordered and adiabatic propagation under time-dependent fields,
closed-form spectra and accumulated Ramsey phases, Heisenberg-limited
multi-sensor scaling, and sweep drivers that regenerate the reference
figures at desk scale.
"""

__version__ = "0.1.0"
