"""
Test suite for scrollsmith.
Covers exact arithmetic, Groebner bases, scroll scans, the chain construction,
cubic fourfolds, dimension formulas and the command-line front end.
"""
