"""Res-Ind Markov chains on multi-Young diagrams of wreath products S_n(T),
with free-probability tools for their averaged limit shapes."""
from .groups import FiniteGroupTable, QComplex, builtin, plancherel_weights, resolve_group
from .diagrams import AtomicMeasure, MultiDiagram, YoungDiagram, multi_dim, transition_measure
from .freeprob import CumulantSeq, LevyMeasure, RSeries, stieltjes
from .pausing import ClockMode, Exponential, Gamma, OneSidedStable, a_limit
from .evolution import EvolutionSpec, ensemble_preset
from .simulate import SimConfig, estimate

__version__ = "0.1.0"

__all__ = [
    "FiniteGroupTable", "QComplex", "builtin", "plancherel_weights", "resolve_group",
    "AtomicMeasure", "MultiDiagram", "YoungDiagram", "multi_dim", "transition_measure",
    "CumulantSeq", "LevyMeasure", "RSeries", "stieltjes",
    "ClockMode", "Exponential", "Gamma", "OneSidedStable", "a_limit",
    "EvolutionSpec", "ensemble_preset", "SimConfig", "estimate",
]
