"""Cost-minimal bidding strategies for campaigns with overlapping targeting.

Documents (instances, strategies, reports) are plain dicts in the same JSON
layout the command-line tool reads and writes.
"""

import json as _json

from . import _bidopt
from ._bidopt import (
    BidoptError,
    DomainError,
    InfeasibleInstance,
    OracleCapExceeded,
    SchemaError,
    SupplyCurve,
    UnsatisfiableSupply,
    UnsupportedCurve,
)

__all__ = [
    "BidoptError", "DomainError", "InfeasibleInstance", "OracleCapExceeded", "SchemaError",
    "SupplyCurve", "UnsatisfiableSupply", "UnsupportedCurve",
    "build_groups", "solve", "mixed", "single", "verify", "cost", "oracle", "simulate",
]


def _dump(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def _strategy(s):
    # "pure" / "mixed" select the solver's own strategies.
    return s if s in ("pure", "mixed") else _dump(s)


def build_groups(criteria):
    return _json.loads(_bidopt.build_groups(_dump(criteria)))


def solve(instance):
    return _json.loads(_bidopt.solve(_dump(instance)))


def mixed(instance, delta=None, b1=None):
    return _json.loads(_bidopt.mixed(_dump(instance), delta, list(b1 or [])))


def single(curve, demand, b1=None):
    if isinstance(curve, SupplyCurve):
        curve = curve.to_json()
    return _json.loads(_bidopt.single(_dump(curve), float(demand), b1))


def verify(instance, allocation="pure"):
    return _json.loads(_bidopt.verify(_dump(instance), _strategy(allocation)))


def cost(instance, strategy):
    return _json.loads(_bidopt.cost(_dump(instance), _strategy(strategy)))


def oracle(instance, gamma_steps=20, subdivisions=1, mixed=False, max_states=1e8):
    return _json.loads(_bidopt.oracle(_dump(instance), gamma_steps, subdivisions, mixed, max_states))


def simulate(instance, strategy, seed, replications=1, poisson=False):
    return _json.loads(_bidopt.simulate(_dump(instance), _strategy(strategy), seed, replications, poisson))
