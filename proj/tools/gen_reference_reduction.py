#!/usr/bin/env python3
# Copyright 2026 The iwacensus Authors
#
# Licensed under the Apache License, Version 2.0 (see
# LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

"""Regenerate tests/data/reference_reduction.csv with PARI/GP (cypari2).

Picks minimal short models y^2 = x^3 + Ax + B so that every Kodaira family
occurs at l = 2, l = 3 and at some l >= 5, and writes one row per
(curve, bad prime) with PARI's elllocalred output.
"""

import itertools
import sys

import cypari2

pari = cypari2.Pari()


def kodaira_symbol(code):
    code = int(code)
    if code == 1:
        return "I0"
    if code == 2:
        return "II"
    if code == 3:
        return "III"
    if code == 4:
        return "IV"
    if code > 4:
        return "I%d" % (code - 4)
    if code == -1:
        return "I0*"
    if code == -2:
        return "II*"
    if code == -3:
        return "III*"
    if code == -4:
        return "IV*"
    return "I%d*" % (-code - 4)


def family(sym):
    if sym.endswith("*") and sym[1:-1].isdigit():
        return "In*"
    if sym[1:].isdigit():
        return "In"
    return sym


def minimal_short(a, b):
    if 4 * a ** 3 + 27 * b ** 2 == 0:
        return False
    for p in range(2, 60):
        if all(p % q for q in range(2, p)) and a % p ** 4 == 0 and b % p ** 6 == 0:
            return False
    return True


def candidates():
    base = list(itertools.product(range(-12, 13), range(-12, 13)))
    for a, b in base:
        yield a, b
    for p in (2, 3, 5, 7):
        for i, j in itertools.product(range(0, 4), range(0, 6)):
            for u, v in ((1, 1), (1, -1), (-1, 1), (2, 1), (1, 2), (-1, 3), (3, 1), (-2, 5), (5, -2)):
                yield u * p ** i, v * p ** j
    for a, b in [(-3 * 4, 16), (-27, 54), (-432, 8208), (0, 16), (0, 432), (-48, 128), (24, 0), (-3, 0)]:
        yield a, b


def main(path):
    rows = []
    seen_curves = set()
    coverage = {}
    for a, b in candidates():
        if (a, b) in seen_curves or not minimal_short(a, b):
            continue
        seen_curves.add((a, b))
        e = pari.ellinit([0, 0, 0, a, b])
        disc = -16 * (4 * a ** 3 + 27 * b ** 2)
        primes = [int(p) for p in pari.factor(abs(disc))[0]]
        new_rows = []
        useful = False
        for p in primes:
            f, kod, _, c = pari.elllocalred(e, p)
            sym = kodaira_symbol(kod)
            key = (min(p, 5), family(sym))
            if coverage.get(key, 0) < 6:
                useful = True
            new_rows.append((a, b, p, sym, int(f), int(c)))
        if useful:
            for r in new_rows:
                key = (min(r[2], 5), family(r[3]))
                coverage[key] = coverage.get(key, 0) + 1
            rows.extend(new_rows)
    with open(path, "w") as out:
        out.write("A,B,ell,kodaira,conductor_exponent,tamagawa\n")
        for r in rows:
            out.write("%d,%d,%d,%s,%d,%d\n" % r)
    curves = len({(r[0], r[1]) for r in rows})
    print("wrote %d rows for %d curves" % (len(rows), curves), file=sys.stderr)
    for k in sorted(coverage):
        print("  l=%s%s %s: %d" % ("" if k[0] < 5 else ">=", k[0], k[1], coverage[k]), file=sys.stderr)


def exhaustive(path, height):
    """Every curve of C(height), every bad prime."""
    amax = int(round(height ** (1.0 / 3))) + 1
    bmax = int(height ** 0.5) + 1
    n = 0
    with open(path, "w") as out:
        out.write("A,B,ell,kodaira,conductor_exponent,tamagawa\n")
        for a in range(-amax, amax + 1):
            for b in range(-bmax, bmax + 1):
                if max(abs(a) ** 3, b * b) > height or not minimal_short(a, b):
                    continue
                e = pari.ellinit([0, 0, 0, a, b])
                disc = -16 * (4 * a ** 3 + 27 * b ** 2)
                for p in pari.factor(abs(disc))[0]:
                    f, kod, _, c = pari.elllocalred(e, p)
                    out.write("%d,%d,%d,%s,%d,%d\n" % (a, b, int(p), kodaira_symbol(kod), int(f), int(c)))
                    n += 1
    print("wrote %d rows" % n, file=sys.stderr)


if __name__ == "__main__":
    if len(sys.argv) > 2 and sys.argv[1] == "--all-height":
        exhaustive(sys.argv[3], int(sys.argv[2]))
    else:
        main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/reference_reduction.csv")
