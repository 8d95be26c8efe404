"""cicrl: dual-actor stabilized off-policy actor-critic training.

Baseline agents (TD3, QMD3, SAC, REDQ) plus a dual-actor wrapper that keeps
a frozen representative policy, promotes the trained policy only when it
scores higher, and adaptively mixes which policy supplies next-actions for
the critic targets.
"""

__version__ = "0.1.0"
