"""Multi-metaheuristic optimizer: a team of population-based optimizers
that periodically share their global bests through a communication scheme."""
