"""Monte Carlo AIXI approximation: action-conditional CTW with rho-UCT planning."""

__version__ = "0.1.0"
