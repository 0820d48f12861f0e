"""Exact decision and quantifier elimination for the first-order theory of
the reals, the classical reductions around the existential theory of the
reals, and the order-type / line-arrangement combinatorics behind them."""

__version__ = "0.1.0"
