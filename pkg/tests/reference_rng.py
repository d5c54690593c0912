"""Standalone splitmix64 reference, independent of the package.

Written from the published splitmix64 algorithm using plain integer
arithmetic only.  Run as a script it prints the obstacle course for a
seed/difficulty, deriving the draws in the documented order; the tests
compare the package against this oracle.
"""

import math
import sys

MASK = (1 << 64) - 1


def splitmix64_stream(seed):
    state = seed & MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def make_rng(seed):
    stream = splitmix64_stream(seed)

    def uniform(lo, hi):
        u = next(stream) >> 11
        return lo + (hi - lo) * (u / 9007199254740992.0)  # 2^53

    def exponential(mean):
        u = next(stream) >> 11
        return -mean * math.log(1.0 - u / 9007199254740992.0)

    return uniform, exponential


def reference_course(seed, difficulty, max_obstacles=3):
    if difficulty == 0 or max_obstacles == 0:
        return [], 1.0, 1.0
    uniform, exponential = make_rng(seed)
    xs = sorted(uniform(1.0, 5.0) for _ in range(min(3, max_obstacles)))
    while len(xs) < max_obstacles:
        xs.append(xs[-1] + uniform(2.0, 4.0))
    obstacles = []
    for x in xs:
        y = uniform(-0.25, 0.25)
        r = 0.05 + exponential(0.05)
        obstacles.append((x, y, r))
    scale_l = scale_r = 1.0
    if difficulty == 2:
        scale_l = uniform(0.5, 1.0)
        scale_r = uniform(0.5, 1.0)
    return obstacles, scale_l, scale_r


if __name__ == "__main__":
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42
    difficulty = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    obstacles, sl, sr = reference_course(seed, difficulty)
    for ob in obstacles:
        print(repr(ob))
    print("psoas_l", repr(sl), "psoas_r", repr(sr))
