"""Majority voting over DHT overlays: tree routing, local thresholding,
change notification, and a gossip baseline, with a deterministic simulator.
"""

from .address_math import Direction
from .dht_overlay import ChurnReport, Overlay, OverlayMode
from .kernels import BACKEND
from .majority_gossip import GossipPeer
from .majority_local import Voter, VoteMessage
from .sim_engine import GossipNetwork, LocalMajorityNetwork, MetricsLog
from .tree_routing import DeliverStatus, TreeMessage

__all__ = [
    "BACKEND",
    "ChurnReport",
    "DeliverStatus",
    "Direction",
    "GossipNetwork",
    "GossipPeer",
    "LocalMajorityNetwork",
    "MetricsLog",
    "Overlay",
    "OverlayMode",
    "TreeMessage",
    "Voter",
    "VoteMessage",
]

__version__ = "0.1.0"
