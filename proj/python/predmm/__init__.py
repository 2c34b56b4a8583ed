"""Market-maker numerics, simulations and log replay."""

from ._predmm import MalformedLog, bmm, lmsr, numerics, replay_metrics, simulate, walk

__all__ = ["MalformedLog", "bmm", "lmsr", "numerics", "replay_metrics", "simulate", "walk"]
