"""sitetwin: deterministic project-control engine.

Earned-value analytics, Bayesian/Monte-Carlo schedule forecasting, resource
leveling recommendations, and what-if scenario evaluation over a single
project snapshot, all reproducible from (project file, seed).
"""

__version__ = "0.1.0"
