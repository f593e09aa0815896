"""Pure-Python depth-first enumerator over an integer-encoded search problem.

The compiled ``_kernel`` extension implements the same function with the same
visiting order; this module is the fallback when it is not built.

Encoding (one entry per candidate step, candidates pre-sorted in output order):
    asset     asset index (bit position in the masks)
    locality  REMOTE / LOCAL / ADJACENT
    phase     0 pre, 1 post, 2 objective
    initial   step uses the InitialAccess tactic
    exfil     step uses the Exfiltration tactic (needs an open channel)
    effect    FOOTHOLD / KNOWLEDGE / CHANNEL / OUTCOME
    goal      an objective step that may terminate an emitted path
    adj       per-asset neighbour bitmask
"""

from __future__ import annotations

REMOTE, LOCAL, ADJACENT = 0, 1, 2
FOOTHOLD, KNOWLEDGE, CHANNEL, OUTCOME = 0, 1, 2, 3
OBJECTIVE = 2


class _Truncated(Exception):
    pass


def enumerate_encoded(asset, locality, phase, initial, exfil, effect, goal, adj,
                      max_depth: int, max_paths: int):
    """Return ``(paths, truncated)``; each path is a tuple of candidate indices.

    At most ``max_paths`` paths are collected. ``truncated`` is true when at
    least one further path exists, so ``max_paths=0`` is an existence test.
    """
    n = len(asset)
    used = [False] * n
    path: list[int] = []
    out: list[tuple[int, ...]] = []

    def dfs(foot: int, reach: int, chan: int, cur: int) -> None:
        if len(path) == max_depth:
            return
        for c in range(n):
            if used[c] or phase[c] < cur:
                continue
            if not foot and not initial[c]:
                continue
            bit = 1 << asset[c]
            loc = locality[c]
            if loc == LOCAL and not foot & bit:
                continue
            if loc == ADJACENT and not reach & bit:
                continue
            if exfil[c] and not chan:
                continue

            nf, nr, nc = foot, reach, chan
            eff = effect[c]
            if eff == FOOTHOLD or eff == CHANNEL:
                if not foot & bit:
                    nf = foot | bit
                    nr = reach | bit | adj[asset[c]]
                if eff == CHANNEL:
                    nc = chan | bit

            path.append(c)
            used[c] = True
            if phase[c] == OBJECTIVE and goal[c]:
                if len(out) == max_paths:
                    raise _Truncated
                out.append(tuple(path))
            dfs(nf, nr, nc, phase[c] if phase[c] > cur else cur)
            path.pop()
            used[c] = False

    try:
        dfs(0, 0, 0, 0)
    except _Truncated:
        return out, True
    return out, False


def path_exists(asset, locality, phase, initial, exfil, effect, goal, adj, max_depth: int) -> bool:
    """Breadth-first existence test over abstract states.

    Legality of a step depends only on (foothold mask, any channel open, phase
    reached), and re-taking a step never changes that state, so a shortest
    witness never repeats a triple. Searching states level by level is therefore
    exact and visits at most 2**assets * 6 states instead of every sequence.
    """
    n = len(asset)
    frontier = {(0, 0, 0): 0}  # (foot, chan, cur) -> reach
    seen = set(frontier)
    for _ in range(max_depth):
        grown: dict[tuple[int, int, int], int] = {}
        for (foot, chan, cur), reach in frontier.items():
            for c in range(n):
                if phase[c] < cur or (not foot and not initial[c]):
                    continue
                bit = 1 << asset[c]
                loc = locality[c]
                if loc == LOCAL and not foot & bit:
                    continue
                if loc == ADJACENT and not reach & bit:
                    continue
                if exfil[c] and not chan:
                    continue
                if phase[c] == OBJECTIVE and goal[c]:
                    return True
                nf, nr, nc = foot, reach, chan
                eff = effect[c]
                if eff == FOOTHOLD or eff == CHANNEL:
                    nf = foot | bit
                    nr = reach | bit | adj[asset[c]]
                    if eff == CHANNEL:
                        nc = 1
                key = (nf, nc, max(cur, phase[c]))
                if key not in seen:
                    seen.add(key)
                    grown[key] = nr
        if not grown:
            return False
        frontier = grown
    return False
