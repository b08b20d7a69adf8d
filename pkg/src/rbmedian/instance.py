"""Problem instances, solutions, and assignments.

An instance partitions the locations of a metric space into clients, red
facilities, and blue facilities, and fixes per-colour opening budgets. A
solution opens exactly k_r red and k_b blue facilities; evaluating it
assigns every client to its nearest open facility (ties to the lowest
facility index) and sums the distances.

JSON formats (used by the CLI and the parse/serialize pair):

    instance: {"n": int,
               "metric": {"matrix": [[...]]} or {"graph": {"edges": [[u, v, len], ...]}},
               "clients": [ids], "red": [ids], "blue": [ids],
               "k_r": int, "k_b": int}
    solution: {"R": [ids], "B": [ids]}

Integer distances are JSON integers; fractional ones are decimal strings
so round-trips are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import InputError
from .metric import GraphSpec, MetricSpace, from_graph, from_matrix


class InstanceError(InputError):
    """Instance-level validation failure (partition, budgets, ranges)."""


class FormatError(InputError):
    """Malformed instance or solution document."""


class InfeasibleSolutionError(InputError):
    """Solution violates the budgets or the colour ground sets."""


@dataclass(eq=False)
class Instance:
    space: MetricSpace
    clients: tuple
    red: tuple
    blue: tuple
    k_r: int
    k_b: int

    def __post_init__(self):
        self.clients = tuple(sorted(self.clients))
        self.red = tuple(sorted(self.red))
        self.blue = tuple(sorted(self.blue))
        n = self.space.n
        everything = list(self.clients) + list(self.red) + list(self.blue)
        if len(set(everything)) != len(everything):
            seen, dups = set(), set()
            for x in everything:
                (dups if x in seen else seen).add(x)
            raise InstanceError(f"clients/red/blue overlap on {sorted(dups)}")
        if sorted(everything) != list(range(n)):
            raise InstanceError(
                f"clients/red/blue must cover exactly 0..{n - 1}, got {len(everything)} "
                f"ids over range {min(everything, default=0)}..{max(everything, default=-1)}"
            )
        if not (0 <= self.k_r <= len(self.red)):
            raise InstanceError(f"budget k_r={self.k_r} out of range for {len(self.red)} red facilities")
        if not (0 <= self.k_b <= len(self.blue)):
            raise InstanceError(f"budget k_b={self.k_b} out of range for {len(self.blue)} blue facilities")
        if self.k_r + self.k_b < 1:
            raise InstanceError("at least one facility must be opened: k_r + k_b >= 1")

    @property
    def red_set(self) -> frozenset:
        return frozenset(self.red)

    @property
    def blue_set(self) -> frozenset:
        return frozenset(self.blue)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.clients == other.clients
            and self.red == other.red
            and self.blue == other.blue
            and self.k_r == other.k_r
            and self.k_b == other.k_b
            and self.space.integral == other.space.integral
            and np.array_equal(self.space.dist, other.space.dist)
        )


@dataclass(frozen=True)
class Solution:
    """Open facility sets, one per colour."""

    R: frozenset
    B: frozenset

    def __post_init__(self):
        object.__setattr__(self, "R", frozenset(self.R))
        object.__setattr__(self, "B", frozenset(self.B))

    def open_sorted(self) -> list:
        return sorted(self.R | self.B)

    def facilities(self) -> frozenset:
        return self.R | self.B


@dataclass
class Assignment:
    """Result of evaluating a solution: per-client facility and distance."""

    solution: Solution
    facility: dict
    distance: dict
    total: object  # int or float


def check_feasible(inst: Instance, sol: Solution) -> None:
    if len(sol.R) != inst.k_r:
        raise InfeasibleSolutionError(
            f"|R| = {len(sol.R)} != k_r = {inst.k_r}, R = {sorted(sol.R)}"
        )
    if len(sol.B) != inst.k_b:
        raise InfeasibleSolutionError(
            f"|B| = {len(sol.B)} != k_b = {inst.k_b}, B = {sorted(sol.B)}"
        )
    stray = sol.R - inst.red_set
    if stray:
        raise InfeasibleSolutionError(f"R contains non-red locations {sorted(stray)}")
    stray = sol.B - inst.blue_set
    if stray:
        raise InfeasibleSolutionError(f"B contains non-blue locations {sorted(stray)}")


def evaluate(inst: Instance, sol: Solution) -> Assignment:
    """Assign each client to its nearest open facility, ties to lowest index."""
    check_feasible(inst, sol)
    open_fac = sol.open_sorted()
    rows = inst.space.rows
    facility, distance = {}, {}
    total = 0
    for j in inst.clients:
        row = rows[j]
        best_f = open_fac[0]
        best_d = row[best_f]
        for f in open_fac[1:]:
            d = row[f]
            if d < best_d:
                best_d, best_f = d, f
        facility[j] = best_f
        distance[j] = best_d
        total += best_d
    return Assignment(solution=sol, facility=facility, distance=distance, total=total)


def disjointify(inst: Instance, s_sol: Solution, o_sol: Solution):
    """Make two solutions facility-disjoint by duplicating shared facilities.

    Each facility open in both solutions gets a copy at distance zero; the
    first solution keeps the original, the second is rewritten to use the
    copy. Both costs are preserved exactly. Returns (instance, s, o); the
    inputs come back untouched when already disjoint.
    """
    check_feasible(inst, s_sol)
    check_feasible(inst, o_sol)
    shared = sorted((s_sol.R & o_sol.R) | (s_sol.B & o_sol.B))
    if not shared:
        return inst, s_sol, o_sol

    n, m = inst.space.n, len(shared)
    old = inst.space.dist
    dist = np.empty((n + m, n + m), dtype=old.dtype)
    dist[:n, :n] = old
    for t, f in enumerate(shared):
        dist[n + t, :n] = old[f, :]
        dist[:n, n + t] = old[:, f]
    for t, f in enumerate(shared):
        for u, g in enumerate(shared):
            dist[n + t, n + u] = old[f, g]
    space = MetricSpace(n=n + m, dist=dist, integral=inst.space.integral)

    copy_of = {f: n + t for t, f in enumerate(shared)}
    red = list(inst.red) + [copy_of[f] for f in shared if f in inst.red_set]
    blue = list(inst.blue) + [copy_of[f] for f in shared if f in inst.blue_set]
    bigger = Instance(space=space, clients=inst.clients, red=tuple(red), blue=tuple(blue),
                      k_r=inst.k_r, k_b=inst.k_b)
    o_new = Solution(
        R=frozenset(copy_of.get(f, f) for f in o_sol.R),
        B=frozenset(copy_of.get(f, f) for f in o_sol.B),
    )
    return bigger, s_sol, o_new


def with_budgets(inst: Instance, k_r: int, k_b: int) -> Instance:
    """Same locations and metric, different opening budgets."""
    return replace(inst, k_r=k_r, k_b=k_b)


def gen_euclidean(n_clients: int, n_red: int, n_blue: int, k_r: int, k_b: int,
                  box_size: float = 1.0, seed: int = 0) -> Instance:
    """Random planar instance: points uniform in a box, Euclidean distances.

    Deterministic in seed. Index layout is clients, then red, then blue.
    """
    for name, v in (("n_clients", n_clients), ("n_red", n_red), ("n_blue", n_blue)):
        if v < 0:
            raise InstanceError(f"{name} must be nonnegative, got {v}")
    if box_size <= 0:
        raise InstanceError(f"box_size must be positive, got {box_size}")
    n = n_clients + n_red + n_blue
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, float(box_size), size=(n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    space = MetricSpace(n=n, dist=dist, integral=False)
    return Instance(
        space=space,
        clients=tuple(range(n_clients)),
        red=tuple(range(n_clients, n_clients + n_red)),
        blue=tuple(range(n_clients + n_red, n)),
        k_r=k_r,
        k_b=k_b,
    )


def _encode_value(x, integral: bool):
    return int(x) if integral else repr(float(x))


def serialize(inst: Instance) -> bytes:
    integral = inst.space.integral
    matrix = [[_encode_value(x, integral) for x in row] for row in inst.space.rows]
    doc = {
        "n": inst.space.n,
        "metric": {"matrix": matrix},
        "clients": list(inst.clients),
        "red": list(inst.red),
        "blue": list(inst.blue),
        "k_r": inst.k_r,
        "k_b": inst.k_b,
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def _decode_value(x):
    if isinstance(x, bool):
        raise FormatError(f"distance entries must be numbers or decimal strings, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            raise FormatError(f"bad decimal string {x!r} in distance data") from None
    raise FormatError(f"distance entries must be numbers or decimal strings, got {x!r}")


def _require(doc: dict, key: str):
    if key not in doc:
        raise FormatError(f"missing required key {key!r}")
    return doc[key]


def _int_list(doc: dict, key: str) -> list:
    val = _require(doc, key)
    if not isinstance(val, list) or any(not isinstance(x, int) or isinstance(x, bool) for x in val):
        raise FormatError(f"{key!r} must be a list of integers")
    return val


def parse(data) -> Instance:
    """Parse an instance document (bytes or str). Raises FormatError or
    InstanceError; both are input errors as far as callers are concerned."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise FormatError(f"malformed document: {e}") from None
    if not isinstance(doc, dict):
        raise FormatError("instance document must be a JSON object")

    n = _require(doc, "n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise FormatError(f"'n' must be a nonnegative integer, got {n!r}")
    metric_doc = _require(doc, "metric")
    if not isinstance(metric_doc, dict):
        raise FormatError("'metric' must be an object")

    if "matrix" in metric_doc:
        matrix = metric_doc["matrix"]
        if not isinstance(matrix, list) or len(matrix) != n or any(
            not isinstance(r, list) or len(r) != n for r in matrix
        ):
            raise FormatError(f"metric matrix must be {n}x{n}")
        values = [[_decode_value(x) for x in row] for row in matrix]
        integral = all(isinstance(x, int) for row in values for x in row)
        if not integral:
            values = [[float(x) for x in row] for row in values]
        space = from_matrix(values)
    elif "graph" in metric_doc:
        graph = metric_doc["graph"]
        if not isinstance(graph, dict) or not isinstance(graph.get("edges"), list):
            raise FormatError("'graph' must be an object with an 'edges' list")
        edges = []
        for e in graph["edges"]:
            if not isinstance(e, list) or len(e) != 3:
                raise FormatError(f"graph edge must be [u, v, length], got {e!r}")
            u, v, w = e
            if not isinstance(u, int) or not isinstance(v, int) or isinstance(u, bool) or isinstance(v, bool):
                raise FormatError(f"graph edge endpoints must be integers in {e!r}")
            edges.append((u, v, _decode_value(w)))
        space = from_graph(GraphSpec(n=n, edges=tuple(edges)))
    else:
        raise FormatError("'metric' must contain either 'matrix' or 'graph'")

    k_r = _require(doc, "k_r")
    k_b = _require(doc, "k_b")
    if not isinstance(k_r, int) or isinstance(k_r, bool):
        raise FormatError(f"'k_r' must be an integer, got {k_r!r}")
    if not isinstance(k_b, int) or isinstance(k_b, bool):
        raise FormatError(f"'k_b' must be an integer, got {k_b!r}")

    return Instance(
        space=space,
        clients=tuple(_int_list(doc, "clients")),
        red=tuple(_int_list(doc, "red")),
        blue=tuple(_int_list(doc, "blue")),
        k_r=k_r,
        k_b=k_b,
    )


def serialize_solution(sol: Solution) -> bytes:
    doc = {"R": sorted(sol.R), "B": sorted(sol.B)}
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def parse_solution(data) -> Solution:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise FormatError(f"malformed solution document: {e}") from None
    if not isinstance(doc, dict):
        raise FormatError("solution document must be a JSON object")
    return Solution(R=frozenset(_int_list(doc, "R")), B=frozenset(_int_list(doc, "B")))
