"""gwht: distributed hypothesis testing over a Gray-Wyner network.

Computes the achievable error exponents, rate regions, random-binning
total-variation bounds, and equivocation bounds of a two-detector
Gray-Wyner hypothesis-testing setup, and validates them empirically by
simulating the underlying binning protocol at small blocklengths.
"""

__version__ = "0.1.0"
