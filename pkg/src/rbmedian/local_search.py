"""Multi-swap local search.

A move closes up to p open facilities of each colour and opens equally
many closed ones of the same colour, keeping both budgets intact. The
neighborhood is enumerated in a fixed canonical order: swap sizes (a, b)
ascending lexicographically, then the index tuples (close_red, open_red,
close_blue, open_blue) lexicographically. Every determinism guarantee in
this module (best-improvement tie-breaks, first-improvement selection,
witness reporting) is stated against that order.

With epsilon > 0 a move is accepted only if it cuts cost by a relative
(epsilon / n) factor, which bounds the number of iterations; epsilon = 0
accepts any strict improvement.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

from .errors import InputError
from .instance import Assignment, Instance, Solution, check_feasible, evaluate

_INF = float("inf")

TERMINATION_LOCAL_OPT = "local-optimum"
TERMINATION_ITERATION_CAP = "iteration-cap"

_PARALLEL_CHUNK = 1024


class InvalidMoveError(InputError):
    """Move is malformed relative to a solution (sizes, membership, overlap)."""


class ConfigError(InputError):
    """Search configuration out of range."""


@dataclass(frozen=True)
class SwapMove:
    close_red: tuple = ()
    open_red: tuple = ()
    close_blue: tuple = ()
    open_blue: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "close_red", tuple(sorted(self.close_red)))
        object.__setattr__(self, "open_red", tuple(sorted(self.open_red)))
        object.__setattr__(self, "close_blue", tuple(sorted(self.close_blue)))
        object.__setattr__(self, "open_blue", tuple(sorted(self.open_blue)))

    def is_empty(self) -> bool:
        return not (self.close_red or self.open_red or self.close_blue or self.open_blue)


@dataclass(frozen=True)
class SearchConfig:
    p: int = 1
    epsilon: float = 0.0
    rule: str = "best"  # "best" or "first"
    seed: int = 0
    max_iters: int = 10**6
    parallel: bool = False

    def __post_init__(self):
        if self.p < 1:
            raise ConfigError(f"p must be >= 1, got {self.p}")
        if not (0.0 <= self.epsilon < 1.0):
            raise ConfigError(f"epsilon must be in [0, 1), got {self.epsilon}")
        if self.rule not in ("best", "first"):
            raise ConfigError(f"rule must be 'best' or 'first', got {self.rule!r}")
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be nonnegative, got {self.max_iters}")


@dataclass
class SearchResult:
    solution: Solution
    assignment: Assignment
    iterations: int
    trace: list
    termination: str

    def to_doc(self) -> dict:
        return {
            "solution": {"R": sorted(self.solution.R), "B": sorted(self.solution.B)},
            "cost": self.assignment.total,
            "iterations": self.iterations,
            "trace": list(self.trace),
            "termination": self.termination,
        }


def validate_move(inst: Instance, sol: Solution, move: SwapMove, p: int | None = None) -> None:
    for label, close, open_, pool, current in (
        ("red", move.close_red, move.open_red, inst.red_set, sol.R),
        ("blue", move.close_blue, move.open_blue, inst.blue_set, sol.B),
    ):
        if len(close) != len(open_):
            raise InvalidMoveError(
                f"{label} swap must close and open equally many: {len(close)} vs {len(open_)}"
            )
        if len(set(close)) != len(close) or len(set(open_)) != len(open_):
            raise InvalidMoveError(f"{label} swap lists contain duplicates")
        if p is not None and len(close) > p:
            raise InvalidMoveError(f"{label} swap size {len(close)} exceeds p = {p}")
        stray = set(close) - current
        if stray:
            raise InvalidMoveError(f"cannot close {label} facilities not open: {sorted(stray)}")
        stray = set(open_) - pool
        if stray:
            raise InvalidMoveError(f"cannot open non-{label} locations: {sorted(stray)}")
        clash = set(open_) & current
        if clash:
            raise InvalidMoveError(f"cannot open already-open {label} facilities: {sorted(clash)}")


def apply_move(sol: Solution, move: SwapMove) -> Solution:
    return Solution(
        R=(sol.R - frozenset(move.close_red)) | frozenset(move.open_red),
        B=(sol.B - frozenset(move.close_blue)) | frozenset(move.open_blue),
    )


class DeltaEvaluator:
    """Incremental cost deltas against one fixed assignment.

    Clients served by a surviving facility can only get cheaper via the
    opened set; clients whose facility closes rescan the survivors. Built
    once per assignment, then O(clients * swap size + closes * open count)
    per move.
    """

    def __init__(self, inst: Instance, assignment: Assignment):
        rows = inst.space.rows
        self.client_rows = [rows[j] for j in inst.clients]
        self.current = [assignment.distance[j] for j in inst.clients]
        self.serving = [assignment.facility[j] for j in inst.clients]
        self.open_sorted = assignment.solution.open_sorted()

    def delta(self, move: SwapMove):
        closing = frozenset(move.close_red) | frozenset(move.close_blue)
        opens = move.open_red + move.open_blue
        survivors = [f for f in self.open_sorted if f not in closing] if closing else None
        total = 0
        for row, cur, srv in zip(self.client_rows, self.current, self.serving):
            if srv in closing:
                best = _INF
                for f in survivors:
                    d = row[f]
                    if d < best:
                        best = d
            else:
                best = cur
            for f in opens:
                d = row[f]
                if d < best:
                    best = d
            if best != cur:
                total += best - cur
        return total


def delta_cost(inst: Instance, assignment: Assignment, move: SwapMove):
    """Exact cost change of applying `move` to the assignment's solution.

    Always equals evaluate(apply_move(...)).total - assignment.total.
    """
    validate_move(inst, assignment.solution, move)
    return DeltaEvaluator(inst, assignment).delta(move)


def neighborhood(inst: Instance, sol: Solution, p: int):
    """Yield every valid move of size at most p per colour, canonical order."""
    if p < 1:
        raise ConfigError(f"p must be >= 1, got {p}")
    check_feasible(inst, sol)
    r_open = sorted(sol.R)
    r_pool = sorted(inst.red_set - sol.R)
    b_open = sorted(sol.B)
    b_pool = sorted(inst.blue_set - sol.B)
    max_a = min(p, len(r_open), len(r_pool))
    max_b = min(p, len(b_open), len(b_pool))
    for a in range(max_a + 1):
        for b in range(max_b + 1):
            if a == 0 and b == 0:
                continue
            for cr in combinations(r_open, a):
                for orr in combinations(r_pool, a):
                    for cb in combinations(b_open, b):
                        for ob in combinations(b_pool, b):
                            yield SwapMove(cr, orr, cb, ob)


def neighborhood_size(inst: Instance, p: int) -> int:
    """Closed-form move count; matches enumeration exactly."""
    def one_colour(k, total):
        spare = total - k
        return sum(math.comb(k, a) * math.comb(spare, a) for a in range(min(p, k, spare) + 1))

    return one_colour(inst.k_r, len(inst.red)) * one_colour(inst.k_b, len(inst.blue)) - 1


def _random_solution(inst: Instance, seed: int) -> Solution:
    rng = random.Random(seed)
    return Solution(
        R=frozenset(rng.sample(list(inst.red), inst.k_r)),
        B=frozenset(rng.sample(list(inst.blue), inst.k_b)),
    )


def _chunked(seq, size):
    for i in range(0, len(seq), size):
        yield seq[i : i + size]


def _scan_best(ev: DeltaEvaluator, moves):
    best_delta, best_move = None, None
    for mv in moves:
        d = ev.delta(mv)
        if best_delta is None or d < best_delta:
            best_delta, best_move = d, mv
    return best_delta, best_move


def _select_move(inst, sol, assignment, config):
    """Return (move, delta) for the accepted move this iteration, or None.

    Acceptance: delta < 0 always, and with epsilon > 0 additionally
    new <= (1 - epsilon/n) * current. Strict decrease is required even at
    the threshold so traces are strictly decreasing and cost-0 states
    cannot loop.
    """
    ev = DeltaEvaluator(inst, assignment)
    total = assignment.total
    scale = inst.space.n

    def accepted(delta):
        if not delta < 0:
            return False
        if config.epsilon:
            return total + delta <= (1.0 - config.epsilon / scale) * total
        return True

    moves = neighborhood(inst, sol, config.p)
    if config.rule == "best":
        if config.parallel:
            chunks = list(_chunked(list(moves), _PARALLEL_CHUNK))
            best_delta, best_move = None, None
            with ThreadPoolExecutor() as pool:
                for d, mv in pool.map(lambda c: _scan_best(ev, c), chunks):
                    if d is not None and (best_delta is None or d < best_delta):
                        best_delta, best_move = d, mv
        else:
            best_delta, best_move = _scan_best(ev, moves)
        if best_move is not None and accepted(best_delta):
            return best_move, best_delta
        return None
    # first-improvement
    if config.parallel:
        with ThreadPoolExecutor() as pool:
            for chunk in _chunked(list(moves), _PARALLEL_CHUNK):
                for mv, d in zip(chunk, pool.map(ev.delta, chunk)):
                    if accepted(d):
                        return mv, d
        return None
    for mv in moves:
        d = ev.delta(mv)
        if accepted(d):
            return mv, d
    return None


def run(inst: Instance, config: SearchConfig, initial: Solution | None = None) -> SearchResult:
    """Iterate accepted swaps until none remains or max_iters is hit.

    Deterministic given (config, initial), including under parallel
    evaluation: selection folds chunk results in canonical order.
    """
    if initial is None:
        sol = _random_solution(inst, config.seed)
    else:
        check_feasible(inst, initial)
        sol = initial
    assignment = evaluate(inst, sol)
    trace = [assignment.total]
    iterations = 0
    termination = TERMINATION_LOCAL_OPT
    while True:
        if iterations >= config.max_iters:
            termination = TERMINATION_ITERATION_CAP
            break
        picked = _select_move(inst, sol, assignment, config)
        if picked is None:
            break
        move, _delta = picked
        sol = apply_move(sol, move)
        assignment = evaluate(inst, sol)
        trace.append(assignment.total)
        iterations += 1
    return SearchResult(
        solution=sol,
        assignment=assignment,
        iterations=iterations,
        trace=trace,
        termination=termination,
    )
