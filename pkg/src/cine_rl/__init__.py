"""Desk-scale drone-cinematography RL: height-map worlds, shot-mode DQN,
hand-crafted and human-in-the-loop rewards."""

__version__ = "0.1.0"
