"""factgate: real-time fact-verification middleware.

Extracts claims from generated text, validates them in parallel against
pluggable knowledge sources, fuses the evidence into calibrated confidence
scores, and rewrites low-confidence claims.
"""

__version__ = "0.1.0"
