"""A contract language with a certified-style compiler to payoff expressions,
kernel code generation, and a Monte Carlo pricing engine."""

__version__ = "0.1.0"
