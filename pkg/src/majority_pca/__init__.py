"""Majority-voter probabilistic cellular automata: simulation and bounds."""
