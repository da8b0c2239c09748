"""Brute-force reference implementations, kept independent of the library paths."""

import functools
import itertools
from collections import deque

import numpy as np


def bfs_reach(n, edges):
    """Reflexive reachability sets (1-based) by breadth-first search from every vertex."""
    adj = {i: [] for i in range(1, n + 1)}
    for a, b in edges:
        adj[a].append(b)
    out = []
    for s in range(1, n + 1):
        seen = {s}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    q.append(w)
        out.append(seen)
    return out


def mass(table, n, fixed):
    """Sum of table over configurations x with x_k == v for every (k, v) in fixed (0-based)."""
    total = 0.0
    for x in range(1 << n):
        if all(((x >> k) & 1) == v for k, v in fixed.items()):
            total += table[x]
    return total


def conditionals(table, n, target, coords, values=(0, 1, None)):
    """Yield P(X_target=1 | assignment) for every positive-probability partial assignment."""
    for roles in itertools.product(values, repeat=len(coords)):
        fixed = {k: v for k, v in zip(coords, roles) if v is not None}
        den = mass(table, n, fixed)
        if den > 0:
            yield mass(table, n, {**fixed, target: 1}) / den


def admissible(table, n, reach, eps, tol=1e-9):
    for i in range(n):
        outside = [k for k in range(n) if (k + 1) not in reach[i]]
        if any(v > eps + tol for v in conditionals(table, n, i, outside)):
            return False
    return True


def in_w(table, n, hoods, eta, tol=1e-9):
    for i in range(n):
        outside = [k for k in range(n) if k not in hoods[i]]
        if any(v < eta - tol for v in conditionals(table, n, i, outside)):
            return False
    return True


@functools.lru_cache(maxsize=None)
def monotone_sets(n):
    """All increasing subsets of {0,1}^n, each as a frozenset of configurations."""
    size = 1 << n
    out = []
    for mask in range(1 << size):
        members = {x for x in range(size) if (mask >> x) & 1}
        if all((x | (1 << k)) in members for x in members for k in range(n)):
            out.append(frozenset(members))
    return out


def dominated_by_enumeration(mu, nu, n, tol=1e-9):
    """mu <=_s nu via every increasing event."""
    for u in monotone_sets(n):
        if sum(mu[x] for x in u) > sum(nu[x] for x in u) + tol:
            return False
    return True


def product_table(params):
    n = len(params)
    t = np.zeros(1 << n)
    for x in range(1 << n):
        p = 1.0
        for k, q in enumerate(params):
            p *= q if (x >> k) & 1 else 1.0 - q
        t[x] = p
    return t
