"""Piggybacked stripe encoding, any-k decoding and single-node repair.

A stripe is a uint8 array of shape (k + r, r, B): row = node (0-based here,
node n lives at index n - 1), column = instance, last axis = byte lanes.
Repair reads cells through a ``fetch(node, column) -> block`` callable using
1-based indices and counts every distinct cell it downloads.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .gf import dot
from .layout import PiggybackPlan
from .mds import CodeParams, ErasureError, ParityMatrix, mds_decode


class RepairError(RuntimeError):
    """A cell needed for repair could not be fetched."""


@dataclass
class TrafficReport:
    mds_phase: int = 0
    piggyback_phase: int = 0
    per_node: Counter = field(default_factory=Counter)

    @property
    def downloaded_cells(self) -> int:
        return self.mds_phase + self.piggyback_phase

    def __add__(self, other: "TrafficReport") -> "TrafficReport":
        return TrafficReport(
            self.mds_phase + other.mds_phase,
            self.piggyback_phase + other.piggyback_phase,
            self.per_node + other.per_node,
        )


class _Fetcher:
    def __init__(self, fetch, failed):
        self.fetch = fetch
        self.failed = failed
        self.cache = {}
        self.report = TrafficReport()

    def __call__(self, node, col, phase):
        key = (node, col)
        if key in self.cache:
            return self.cache[key]
        if node == self.failed:
            raise RepairError(f"attempted to read failed node {node}")
        try:
            cell = self.fetch(node, col)
        except Exception as exc:
            raise RepairError(f"repair degraded: cannot fetch node {node} col {col}: {exc}") from exc
        if cell is None:
            raise RepairError(f"repair degraded: node {node} col {col} unavailable")
        cell = np.asarray(cell, dtype=np.uint8)
        self.cache[key] = cell
        if phase == "mds":
            self.report.mds_phase += 1
        else:
            self.report.piggyback_phase += 1
        self.report.per_node[node] += 1
        return cell


def _check_message(params, message):
    message = np.asarray(message, dtype=np.uint8)
    if message.ndim != 3 or message.shape[:2] != (params.k, params.r):
        raise ValueError(f"message must have shape (k={params.k}, r={params.r}, B), got {message.shape}")
    return message


def encode_stripe(params: CodeParams, pm: ParityMatrix, plan: PiggybackPlan, message) -> np.ndarray:
    message = _check_message(params, message)
    k, r = params.k, params.r
    stripe = np.zeros((k + r,) + message.shape[1:], dtype=np.uint8)
    stripe[:k] = message
    for c in range(r):
        col = list(message[:, c])
        for p, row in enumerate(pm.rows):
            stripe[k + p, c] = dot(row, col)
    for (c, p), srcs in plan.entries.items():
        cell = stripe[k + p - 1, c - 1]
        for i, j in srcs:
            cell ^= message[i - 1, j - 1]
    return stripe


def decode_stripe(params: CodeParams, pm: ParityMatrix, plan: PiggybackPlan, surviving) -> np.ndarray:
    """Rebuild the k x r message from ``{node: row}`` for any >= k surviving nodes."""
    k, r = params.k, params.r
    nodes = sorted(n for n in surviving if 1 <= n <= k + r)
    if len(nodes) < k:
        raise ErasureError(f"too many erasures: {len(nodes)} nodes survive, need {k}")
    rows = {n: np.asarray(surviving[n], dtype=np.uint8) for n in nodes}
    B = rows[nodes[0]].shape[-1]
    message = np.zeros((k, r, B), dtype=np.uint8)
    for c in range(1, r + 1):
        pig = plan.column(c)
        symbols = []
        for n in nodes:
            cell = rows[n][c - 1]
            if n > k and (n - k) in pig:
                cell = cell.copy()
                for i, j in pig[n - k]:
                    cell ^= message[i - 1, j - 1]
            symbols.append((n, cell))
        for idx, blk in enumerate(mds_decode(pm, symbols)):
            message[idx, c - 1] = blk
    return message


def repair_systematic(params: CodeParams, pm: ParityMatrix, plan: PiggybackPlan, failed: int, fetch):
    k, r = params.k, params.r
    if not 1 <= failed <= k:
        raise ValueError(f"node {failed} is not systematic")
    get = _Fetcher(fetch, failed)
    l = plan.group_of_node[failed]
    first = r - l + 1
    out = [None] * r

    # MDS phase: the other k-1 systematic cells plus the never-piggybacked f_1
    decoded = {}
    for c in range(first, r + 1):
        symbols = [(n, get(n, c, "mds")) for n in range(1, k + 1) if n != failed]
        symbols.append((k + 1, get(k + 1, c, "mds")))
        decoded[c] = mds_decode(pm, symbols)
        out[c - 1] = decoded[c][failed - 1]

    where = plan.locate()
    for j in range(1, first):
        c, p = where[failed, j]
        if c not in decoded:
            raise RepairError(f"plan places ({failed},{j}) outside the decoded columns")
        cell = get(k + p, c, "piggyback") ^ dot(pm.rows[p - 1], decoded[c])
        for i2, j2 in plan.entries[c, p]:
            if (i2, j2) != (failed, j):
                cell ^= get(i2, j2, "piggyback")
        out[j - 1] = cell
    return np.stack(out), get.report


def repair_parity(params: CodeParams, pm: ParityMatrix, plan: PiggybackPlan, failed: int, fetch):
    k, r = params.k, params.r
    if not k < failed <= k + r:
        raise ValueError(f"node {failed} is not a parity node")
    get = _Fetcher(fetch, failed)
    message = np.stack([np.stack([get(i, j, "mds") for j in range(1, r + 1)]) for i in range(1, k + 1)])
    p = failed - k
    row = np.stack([dot(pm.rows[p - 1], list(message[:, c])) for c in range(r)])
    for c in range(1, r + 1):
        for i, j in plan.entries.get((c, p), ()):
            row[c - 1] ^= message[i - 1, j - 1]
    return row, get.report


def repair_node(params: CodeParams, pm: ParityMatrix, plan: PiggybackPlan, failed: int, fetch):
    if failed <= params.k:
        return repair_systematic(params, pm, plan, failed, fetch)
    return repair_parity(params, pm, plan, failed, fetch)


def stripe_fetcher(stripe):
    """Fetch callable over an in-memory stripe (1-based node and column)."""
    return lambda node, col: stripe[node - 1, col - 1]
