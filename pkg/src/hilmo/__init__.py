"""Two-level hierarchical reinforcement learning for motion-based
mixed-observability MDPs, with exact planning oracles, desk-scale
environments, and a reproducible training harness."""

__version__ = "0.1.0"
