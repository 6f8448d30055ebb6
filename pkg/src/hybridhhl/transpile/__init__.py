from .router import TranspileReport, route
from .study import depth_study, write_study
from .topology import BUILTIN, CouplingMap, TopologyError, all_to_all, line, load_topology

__all__ = ["BUILTIN", "CouplingMap", "TopologyError", "TranspileReport", "all_to_all",
           "depth_study", "line", "load_topology", "route", "write_study"]
