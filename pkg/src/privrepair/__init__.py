"""Private repair and retrieval of Reed-Solomon coded symbols.

Exact finite-field arithmetic with subfield traces, subspace
(linearized) polynomials, Reed-Solomon codes with their dual
multipliers, four repair/retrieval protocols, an exhaustive privacy
auditor, bandwidth lower bounds, and a deterministic cluster simulator.
A FastAPI service (``privrepair.service``) exposes the toolkit over
HTTP; the CLI (``privrepair.cli``) is a thin client for it.
"""

__version__ = "0.1.0"
