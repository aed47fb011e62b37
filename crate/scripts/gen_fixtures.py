#!/usr/bin/env python3
"""Regenerate the test fixtures under crates/core/tests/fixtures.

ieee30/    IEEE 30-bus network laid out on a 517 x 464 cell study area
           (0.075 mi cells). Bus placement is synthetic; line lengths and
           ignition counts are the reference per-line data.
line24/    Reference season x shift damage matrix for line 24, in dollars.
tiny_world/ Three-line world with a 40 x 40 landscape and a year of hourly
           weather, small enough for end-to-end runs in tests.

Output is deterministic: run it again and nothing changes.
"""

import math
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "crates", "core", "tests", "fixtures")

# branch: (from, to)
BRANCHES = {
    1: (1, 2), 2: (1, 3), 3: (2, 4), 4: (3, 4), 5: (2, 5), 6: (2, 6), 7: (4, 6), 8: (5, 7),
    9: (6, 7), 10: (6, 8), 11: (6, 9), 12: (6, 10), 13: (9, 11), 14: (9, 10), 15: (4, 12),
    16: (12, 13), 17: (12, 14), 18: (12, 15), 19: (12, 16), 20: (14, 15), 21: (16, 17),
    22: (15, 18), 23: (18, 19), 24: (19, 20), 25: (10, 20), 26: (10, 17), 27: (10, 21),
    28: (10, 22), 29: (21, 22), 30: (15, 23), 31: (22, 24), 32: (23, 24), 33: (24, 25),
    34: (25, 26), 35: (25, 27), 36: (28, 27), 37: (27, 29), 38: (27, 30), 39: (29, 30),
    40: (8, 28), 41: (6, 28),
}
LINKS = {11, 12, 13, 14, 15, 16, 36}
# branch: (length miles, ignition points)
LINE_DATA = {
    1: (11.3, 37), 2: (15.2, 49), 3: (28.4, 91), 4: (4.8, 15), 5: (31.3, 99), 6: (33.6, 107),
    7: (16.3, 51), 8: (10.9, 35), 9: (9.5, 29), 10: (12.8, 41), 17: (14.2, 45), 18: (9.79, 31),
    19: (13.6, 43), 20: (7.64, 25), 21: (5.45, 17), 22: (6.67, 21), 23: (5.87, 19), 24: (4.44, 13),
    25: (15.1, 47), 26: (9.17, 29), 27: (6.39, 21), 28: (9.59, 31), 29: (4.05, 13), 30: (14.0, 45),
    31: (14.0, 45), 32: (8.79, 27), 33: (7.55, 23), 34: (9.58, 29), 35: (5.76, 19), 37: (6.61, 21),
    38: (14.5, 45), 39: (7.94, 25), 40: (28.6, 89), 41: (28.4, 89),
}
STUDY_W = 517 * 0.075
STUDY_H = 464 * 0.075
MARGIN = 0.5

LINE24_MATRIX = [
    [15, 15, 16, 16, 15, 15, 15, 15],
    [58, 57, 56, 56, 58, 58, 58, 58],
    [143, 143, 141, 138, 135, 136, 137, 142],
    [108, 109, 106, 102, 100, 103, 105, 107],
]


def arc(poly):
    return sum(math.dist(a, b) for a, b in zip(poly, poly[1:]))


def zigzag(a, b, amp, m=4):
    (ax, ay), (bx, by) = a, b
    d = math.dist(a, b)
    nx, ny = -(by - ay) / d, (bx - ax) / d
    pts = [a]
    for i in range(1, m + 1):
        t = i / (m + 1)
        s = amp if i % 2 else -amp
        pts.append((ax + (bx - ax) * t + nx * s, ay + (by - ay) * t + ny * s))
    pts.append(b)
    return pts


def fit_zigzag(a, b, length):
    lo, hi = 0.0, length
    for _ in range(200):
        mid = (lo + hi) / 2
        if arc(zigzag(a, b, mid)) < length:
            lo = mid
        else:
            hi = mid
    return zigzag(a, b, (lo + hi) / 2)


def place_buses(rng):
    pos = {b: [rng.uniform(MARGIN, STUDY_W - MARGIN), rng.uniform(MARGIN, STUDY_H - MARGIN)] for b in range(1, 31)}
    want = {}
    for br, (f, t) in BRANCHES.items():
        if br in LINKS:
            want[br] = (0.5, 1.5)
        elif br == 24:
            want[br] = (4.44, 4.44)
        else:
            want[br] = (0.35 * LINE_DATA[br][0], 0.8 * LINE_DATA[br][0])
    for it in range(20000):
        step = 0.5
        moved = 0.0
        for br, (f, t) in BRANCHES.items():
            lo, hi = want[br]
            pa, pb = pos[f], pos[t]
            d = math.dist(pa, pb) or 1e-9
            target = min(max(d, lo), hi)
            if target != d:
                k = step * (d - target) / d / 2
                dx, dy = (pb[0] - pa[0]) * k, (pb[1] - pa[1]) * k
                pa[0] += dx
                pa[1] += dy
                pb[0] -= dx
                pb[1] -= dy
                moved += abs(d - target)
        buses = list(pos)
        for i in buses:
            for j in buses:
                if i < j:
                    d = math.dist(pos[i], pos[j]) or 1e-9
                    if d < 0.6:
                        k = (0.6 - d) / d / 4
                        dx, dy = (pos[j][0] - pos[i][0]) * k, (pos[j][1] - pos[i][1]) * k
                        pos[i][0] -= dx
                        pos[i][1] -= dy
                        pos[j][0] += dx
                        pos[j][1] += dy
        for p in pos.values():
            p[0] = min(max(p[0], MARGIN), STUDY_W - MARGIN)
            p[1] = min(max(p[1], MARGIN), STUDY_H - MARGIN)
        if moved < 1e-7:
            break
    return {b: (round(x, 6), round(y, 6)) for b, (x, y) in pos.items()}


def inside(p):
    return 0.0 <= p[0] <= STUDY_W and 0.0 <= p[1] <= STUDY_H


def fmt(v):
    return f"{v:.6f}".rstrip("0").rstrip(".")


def write_ieee30():
    rng = random.Random(30)
    for attempt in range(200):
        buses = place_buses(rng)
        (x19, y19), (x20, y20) = buses[19], buses[20]
        d = math.dist(buses[19], buses[20])
        buses[20] = (x19 + (x20 - x19) * 4.44 / d, y19 + (y20 - y19) * 4.44 / d)
        if not inside(buses[20]):
            continue
        polylines = {}
        ok = True
        for br, (f, t) in BRANCHES.items():
            if br in LINKS or br == 24:
                continue
            length = LINE_DATA[br][0]
            if math.dist(buses[f], buses[t]) > 0.95 * length:
                ok = False
                break
            poly = [(round(x, 6), round(y, 6)) for x, y in fit_zigzag(buses[f], buses[t], length)]
            if not all(inside(p) for p in poly) or abs(arc(poly) - length) > 1e-4 * length:
                ok = False
                break
            polylines[br] = poly
        if ok:
            break
    else:
        raise SystemExit("could not place the network")

    out = os.path.join(ROOT, "ieee30")
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "grid.txt"), "w") as fh:
        fh.write("# IEEE 30-bus test system on a 38.775 x 34.8 mile study area.\n")
        fh.write("# Bus coordinates are synthetic. Line 24 uses the straight bus-to-bus segment.\n")
        fh.write("[buses]\n# id, x, y\n")
        for b in sorted(buses):
            x, y = buses[b]
            fh.write(f"{b}, {fmt(x)}, {fmt(y)}\n")
        fh.write("[branches]\n# branch_id, from_bus, to_bus, kind, length_miles, ignition_points, polyline\n")
        for br in sorted(BRANCHES):
            f, t = BRANCHES[br]
            if br in LINKS:
                fh.write(f"{br}, {f}, {t}, link, , ,\n")
                continue
            length, points = LINE_DATA[br]
            poly = ";".join(f"{fmt(x)},{fmt(y)}" for x, y in polylines.get(br, []))
            fh.write(f"{br}, {f}, {t}, line, {length}, {points}, {poly}\n")


def write_line24():
    out = os.path.join(ROOT, "line24")
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "matrix_24.csv"), "w") as fh:
        fh.write("season,0,45,90,135,180,225,270,315\n")
        for name, row in zip(["winter", "spring", "summer", "fall"], LINE24_MATRIX):
            fh.write(name + "," + ",".join(str(v * 1_000_000) for v in row) + "\n")
    with open(os.path.join(out, "config.toml"), "w") as fh:
        fh.write("# Only the probabilities matter for ranking existing matrices.\n")
        fh.write('[paths]\nlandscape = "unused"\ngrid = "unused"\nweather = "unused"\n')


def write_asc(path, ncols, nrows, cs, nodata, rows_south_first, fmtv):
    with open(path, "w") as fh:
        fh.write(f"ncols {ncols}\nnrows {nrows}\nxllcorner 0\nyllcorner 0\ncellsize {cs}\nnodata_value {nodata}\n")
        for row in reversed(rows_south_first):
            fh.write(" ".join(fmtv(v) for v in row) + "\n")


def write_tiny_world():
    rng = random.Random(7)
    n, cs = 40, 0.075
    out = os.path.join(ROOT, "tiny_world")
    land = os.path.join(out, "landscape")
    os.makedirs(land, exist_ok=True)

    cell_m = cs * 1609.344
    hills = [(rng.uniform(0, n), rng.uniform(0, n), rng.uniform(40, 160), rng.uniform(4, 12)) for _ in range(5)]

    def z(c, r):
        return 300.0 + sum(h * math.exp(-((c - hc) ** 2 + (r - hr) ** 2) / (2 * s * s)) for hc, hr, h, s in hills)

    elev, slope, aspect = [], [], []
    for r in range(n):
        er, sr, ar = [], [], []
        for c in range(n):
            dzdx = (z(c + 0.5, r) - z(c - 0.5, r)) / cell_m
            dzdy = (z(c, r + 0.5) - z(c, r - 0.5)) / cell_m
            g = math.hypot(dzdx, dzdy)
            er.append(round(z(c, r), 1))
            s = round(math.degrees(math.atan(g)), 2)
            sr.append(s)
            if s == 0.0:
                ar.append(-9999)
            else:
                a = round(math.degrees(math.atan2(-dzdx, -dzdy)) % 360.0, 2)
                ar.append(0.0 if a >= 360.0 else a)
        elev.append(er)
        slope.append(sr)
        aspect.append(ar)

    slow = [8, 9, 10, 11, 12, 13]
    fuel = [[rng.choice(slow) for _ in range(n)] for _ in range(n)]
    # a river of water and a rock outcrop
    for r in range(n):
        c = int(20 + 6 * math.sin(r / 5.0))
        fuel[r][c] = 98
    for r in range(28, 33):
        for c in range(5, 11):
            fuel[r][c] = 99

    def canopy(scale, digits):
        return [[round(rng.uniform(0, scale), digits) for _ in range(n)] for _ in range(n)]

    write_asc(os.path.join(land, "elevation.asc"), n, n, cs, -9999, elev, lambda v: str(v))
    write_asc(os.path.join(land, "slope.asc"), n, n, cs, -9999, slope, lambda v: str(v))
    write_asc(os.path.join(land, "aspect.asc"), n, n, cs, -9999, aspect, lambda v: str(v))
    write_asc(os.path.join(land, "fuel_model.asc"), n, n, cs, -9999, fuel, lambda v: str(v))
    write_asc(os.path.join(land, "canopy_cover.asc"), n, n, cs, -9999, canopy(80, 0), lambda v: str(int(v)))
    write_asc(os.path.join(land, "stand_height.asc"), n, n, cs, -9999, canopy(30, 1), lambda v: str(v))
    write_asc(os.path.join(land, "canopy_base_height.asc"), n, n, cs, -9999, canopy(5, 1), lambda v: str(v))
    write_asc(os.path.join(land, "canopy_bulk_density.asc"), n, n, cs, -9999, canopy(0.3, 3), lambda v: str(v))

    lines = [
        (1, 1, 2, 3, [(0.3, 0.4), (0.9, 0.7), (1.05, 1.1)]),
        (2, 2, 3, 3, [(1.05, 1.1), (1.6, 1.5), (2.2, 1.6)]),
        (5, 3, 4, 4, [(2.2, 1.6), (2.5, 2.3), (2.4, 2.9), (1.7, 2.6)]),
    ]
    buses = {1: (0.3, 0.4), 2: (1.05, 1.1), 3: (2.2, 1.6), 4: (1.7, 2.6)}
    with open(os.path.join(out, "grid.txt"), "w") as fh:
        fh.write("[buses]\n")
        for b, (x, y) in buses.items():
            fh.write(f"{b}, {x}, {y}\n")
        fh.write("[branches]\n")
        for br, f, t, k, poly in lines:
            length = round(arc(poly), 4)
            fh.write(f"{br}, {f}, {t}, line, {length}, {k}, " + ";".join(f"{x},{y}" for x, y in poly) + "\n")
        fh.write("9, 2, 4, link, , ,\n")

    with open(os.path.join(out, "weather.csv"), "w") as fh:
        fh.write("timestamp,temperature_c,humidity_pct,wind_speed_mph,wind_dir_deg\n")
        import datetime

        t = datetime.datetime(2022, 1, 1)
        end = datetime.datetime(2023, 1, 1)
        gust = 0.0
        while t < end:
            doy = t.timetuple().tm_yday
            seasonal = -math.cos(2 * math.pi * (doy - 15) / 365.0)
            diurnal = math.sin(2 * math.pi * (t.hour - 9) / 24.0)
            temp = 14 + 12 * seasonal + 6 * diurnal + rng.gauss(0, 1.5)
            hum = min(100.0, max(3.0, 55 - 20 * seasonal - 15 * diurnal + rng.gauss(0, 6)))
            gust = max(0.0, 0.85 * gust + rng.gauss(0, 2.2))
            speed = max(0.0, 6 + 3 * diurnal + gust + rng.gauss(0, 1.0))
            direction = (250 + 40 * math.sin(doy / 29.0) + rng.gauss(0, 25)) % 360.0
            d = round(direction, 1)
            if d >= 360.0:
                d = 0.0
            fh.write(f"{t:%Y-%m-%dT%H:00},{temp:.1f},{hum:.1f},{speed:.1f},{d}\n")
            t += datetime.timedelta(hours=1)

    with open(os.path.join(out, "config.toml"), "w") as fh:
        fh.write(
            """[paths]
landscape = "landscape"
grid = "grid.txt"
weather = "weather.csv"

[study]
year = 2022
tower_spacing_miles = 0.3
cell_size_miles = 0.075
burn_window_hours = 12

[spread]
k_w = 0.4
k_s = 3.0
burn_duration_hours = 1.0
neighborhood = 16

[rates]
third_party_usd_per_acre = 20000
grid_usd_per_mile = 200000
"""
        )


if __name__ == "__main__":
    write_ieee30()
    write_line24()
    write_tiny_world()
