"""Vectorized AUV docking simulator with a numpy PPO training stack."""

__version__ = "0.1.0"
