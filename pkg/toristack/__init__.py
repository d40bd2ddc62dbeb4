"""Exact computations on labelled polytopes and toric DM stacks."""
