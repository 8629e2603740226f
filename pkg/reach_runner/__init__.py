__all__ = [
    "arena",
    "mealy",
    "zerosum",
    "parikh",
    "pareto",
    "nash",
    "ncns_one_env",
    "oracle",
    "reductions",
    "formats",
    "runner",
]
