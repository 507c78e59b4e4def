"""Reward-seeking betting agents on simulated qubit data.

Trains epsilon-greedy agents to bet on SIC-based qubit experiments, fits the
generalized Born-rule kernel implied by their bets, and measures how much
noise a qubit fragment needs before it admits a noncontextual model.
"""

__version__ = "0.1.0"
