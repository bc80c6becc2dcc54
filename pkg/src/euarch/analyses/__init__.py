"""Pluggable architecture analyses over immutable models."""

from .security import SecurityPolicy, security_analysis
from .ordering import WorkflowCorpus, ordering_analysis
from .performance import CostModel, performance_estimate
from .repair import ConverterGraph, QosPreference, RepairPlan, mismatch_repair, apply_repair
from .pubsub import CommTopology, generate_topologies, lost_information, pubsub_topology

__all__ = [
    "SecurityPolicy", "security_analysis",
    "WorkflowCorpus", "ordering_analysis",
    "CostModel", "performance_estimate",
    "ConverterGraph", "QosPreference", "RepairPlan", "mismatch_repair", "apply_repair",
    "CommTopology", "pubsub_topology", "lost_information", "generate_topologies",
]
