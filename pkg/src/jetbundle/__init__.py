"""Exact jets, invariant operators and the sl(2) Casimir over the projective line and projective atlases."""
