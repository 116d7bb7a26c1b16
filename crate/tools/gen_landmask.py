#!/usr/bin/env python3
"""Regenerate the bundled coarse land mask raster.

Rasterizes a set of hand-drawn continent outlines onto a 0.5 degree grid.
The outlines are deliberately coarse; the mask only has to decide whether
a candidate ground-station site sits on land, to ~100 km fidelity.

Usage: python3 tools/gen_landmask.py > crates/core/data/landmask_0p5deg.txt
"""

import sys

import numpy as np
from matplotlib.path import Path

RES = 0.5
ROWS = int(180 / RES)
COLS = int(360 / RES)

# (lon, lat) loops; vertex order is irrelevant for point-in-polygon
LAND = {
    "north_america": [
        (-166, 64.5), (-168, 63), (-165, 60), (-163, 59), (-166, 55), (-161, 55.5),
        (-158, 56), (-152, 58), (-150, 59), (-146, 61), (-140, 60), (-136, 58),
        (-132, 54), (-128, 51), (-124, 48), (-124, 43), (-124, 40), (-122, 37),
        (-121, 34), (-117, 33), (-114, 28), (-113, 26), (-110, 23), (-106, 23),
        (-105, 20), (-96, 16), (-92, 15), (-87, 13), (-85, 11), (-80, 8),
        (-78, 8.5), (-80, 9), (-83, 10), (-83, 15), (-88, 16), (-87, 21),
        (-91, 21), (-90, 18.5), (-95, 18.5), (-97, 22), (-97, 26), (-94, 29),
        (-89, 29), (-86, 30), (-83, 29), (-81, 25), (-80, 27), (-80, 32),
        (-76, 34), (-76, 37), (-75, 38), (-74, 40), (-70, 43), (-67, 47),
        (-65, 49), (-60, 50), (-56, 52), (-60, 56), (-64, 60), (-68, 60),
        (-75, 61), (-77, 65), (-76, 69), (-72, 73), (-75, 73), (-78, 72),
        (-81, 70), (-82, 67), (-85, 66), (-90, 65.5), (-94, 66), (-96, 70.5),
        (-100, 71), (-105, 72), (-110, 73), (-118, 72.5), (-124, 71.5),
        (-128, 70), (-136, 69), (-145, 70), (-156, 71.5), (-161, 70.5),
        (-166, 68.5),
    ],
    "greenland": [
        (-73, 78), (-66, 76), (-60, 75), (-58, 74), (-53, 70), (-48, 66),
        (-43, 60), (-42, 62), (-40, 64), (-32, 68), (-25, 70), (-22, 70),
        (-20, 73), (-22, 76), (-30, 79), (-38, 80), (-46, 81), (-56, 82),
        (-62, 82), (-68, 81),
    ],
    "south_america": [
        (-78, 8.5), (-75, 10), (-72, 12), (-68, 11), (-64, 10.5), (-60, 9),
        (-56, 6), (-53, 5), (-50, 2), (-48, -1), (-44, -2.5), (-40, -3),
        (-35, -5), (-34.8, -8), (-37, -12), (-39, -15), (-39, -18), (-41, -22),
        (-45, -23.5), (-48, -26), (-49, -29), (-52, -32), (-56, -34.5),
        (-58, -34), (-57, -36), (-59, -39), (-62, -39.5), (-63, -42), (-65, -43),
        (-66, -47), (-68, -50), (-69, -52), (-72, -54), (-74, -53), (-73, -50),
        (-74, -46), (-74, -42), (-73, -38), (-72, -34), (-71, -30), (-70, -25),
        (-70, -18), (-75, -15), (-79, -9), (-81, -6), (-81, -3), (-80, 0),
        (-78, 2), (-77, 5),
    ],
    "africa": [
        (-6, 35.5), (-2, 35.5), (3, 37), (10, 37.5), (11, 35), (15, 32.5),
        (20, 32.5), (25, 32), (30, 31.5), (34, 29.5), (34, 28), (36, 24),
        (38, 18), (40, 15), (43, 11.5), (47, 11), (51, 12), (51, 10.5),
        (48, 5), (44, 0), (41, -3), (40, -7), (39, -11), (36, -15), (35, -20),
        (33, -26), (31, -29), (28, -33), (25, -34.5), (20, -34.8), (18, -33),
        (16, -28), (14, -22), (12, -17), (12, -12), (13, -8), (9, -2), (9, 2),
        (6, 4), (1, 5.5), (-5, 5), (-8, 4.5), (-13, 7.5), (-17, 12), (-17, 15),
        (-16, 20), (-13, 24), (-10, 29), (-9, 31.5),
    ],
    "eurasia": [
        (-9, 43.5), (-9, 37), (-5.5, 36), (-1, 36.5), (1, 38), (3, 41.5),
        (3, 43), (7, 43.5), (10, 44), (12, 45.5), (14, 45), (16, 43.5),
        (19, 42), (21, 40), (22, 38), (24, 36.5), (27, 36.5), (30, 36),
        (33, 36), (36, 36), (35, 33), (34, 31), (34, 29.5), (35, 28),
        (37, 25), (39, 21), (42, 16), (43, 12.5), (45, 12.8), (48, 14),
        (52, 17), (55, 18), (57, 20), (58, 22), (58, 24), (56, 26), (54, 26.5),
        (51, 27), (48, 30), (49, 30), (51, 27.5), (54, 26.8), (57, 27),
        (60, 25.5), (62, 25), (66, 25), (68, 23.5), (70, 22.5), (70, 20.8),
        (72, 19), (73, 16), (74.5, 13), (76, 10), (77.5, 8), (79, 10),
        (80, 13), (80.3, 16), (83, 18), (86, 20), (88, 21.8), (90, 22),
        (92, 21.5), (94, 18), (94.5, 16), (97, 16.5), (98, 13), (98.5, 10),
        (100, 8), (102, 6), (103.5, 1.5), (104, 3), (105, 8), (106, 10),
        (107, 11), (109, 13), (109, 16), (106, 19), (108, 21), (110, 21),
        (114, 22.5), (117, 23.5), (120, 26), (121, 28), (122, 30), (121, 32),
        (120, 34), (122, 37), (124, 39.5), (125, 38), (126, 35), (128, 35),
        (129.5, 38), (128, 40), (130, 42.5), (132, 43), (135, 44), (138, 46.5),
        (140, 48), (141, 51), (142, 53.5), (141, 55), (138, 54), (136, 55),
        (138, 57), (141, 58), (145, 59), (150, 59), (153, 59), (155, 57),
        (156, 53), (158, 52), (160, 54), (162, 56), (163, 58), (165, 60),
        (170, 60), (174, 61.5), (178, 62.5), (180, 64), (180, 68), (176, 69.5),
        (170, 70), (160, 70.5), (150, 72), (140, 72.5), (128, 73), (113, 74),
        (105, 77), (96, 76), (90, 75.5), (80, 73), (72, 71), (66, 69),
        (60, 69), (55, 68), (48, 68), (44, 67.5), (40, 66.5), (33, 67),
        (31, 70), (28, 70.5), (24, 71), (18, 69), (14, 67), (10, 64), (5, 62),
        (5, 60), (6, 58), (8, 57), (9, 55), (12, 54), (14, 54), (20, 54.5),
        (24, 57), (24, 59), (26, 60), (30, 60), (28, 59), (24, 58.5), (22, 57),
        (21, 55), (18, 55), (14, 53.5), (9, 54), (8, 55), (7, 53.5), (4, 52),
        (1, 50), (-2, 48.5), (-4, 48), (-2, 46), (-2, 44),
    ],
    "scandinavia_baltic_rim": [
        # Sweden/Finland east of the Norwegian spine, wrapped around Bothnia
        (12, 56), (14, 56), (16, 57), (18, 59), (17, 61), (19, 63), (21, 65),
        (24, 66), (25, 65), (24, 64), (22, 62), (21, 60), (24, 60), (28, 61),
        (30, 62), (31, 63), (30, 65), (28, 67), (26, 68), (22, 68), (18, 68),
        (14, 66), (12, 63), (10, 60), (10, 58),
    ],
    "british_isles": [
        (-5.5, 50), (0.5, 50.8), (1.7, 52.5), (-0.5, 54), (-1.5, 56),
        (-2.5, 58), (-5, 58.6), (-6, 57), (-4.8, 55.5), (-3.5, 54.5),
        (-4.7, 53.3), (-5.3, 51.8),
    ],
    "ireland": [(-10, 51.5), (-6, 52), (-5.5, 54), (-7, 55.3), (-10, 54)],
    "iceland": [
        (-22, 63.4), (-18, 63.3), (-14, 64.3), (-15, 66), (-19, 66.5),
        (-23, 66), (-24, 64.8),
    ],
    "japan": [
        (130, 31), (131, 33), (132, 34), (135, 34), (136, 35), (140, 35.5),
        (141, 38), (141.5, 41), (140, 42), (141, 43), (144, 43), (145, 44.5),
        (142, 45.5), (140, 43.5), (139, 40), (137, 37), (133, 35.5),
        (130, 33.5), (129, 32),
    ],
    "chukotka": [
        (-180, 65), (-175, 64.5), (-170, 64), (-170, 66), (-175, 67.5),
        (-180, 68.5),
    ],
    "australia": [
        (114, -22), (113, -25), (115, -30), (115, -34), (118, -35), (122, -34),
        (126, -32), (129, -32), (132, -32), (134, -33), (136, -35), (138, -35.5),
        (140, -38), (145, -38.5), (147, -38), (150, -37), (152, -33), (153, -29),
        (153, -25), (151, -22), (149, -20), (146, -18), (143, -14), (142, -11),
        (141, -13), (140, -17), (136, -15), (135, -12), (132, -11), (130, -13),
        (128, -15), (125, -14), (122, -17), (119, -20),
    ],
    "sumatra": [
        (95.5, 5), (98, 3), (101, 0), (103, -2), (105, -4), (106, -6),
        (104, -6), (101, -3), (98, 0), (95, 3),
    ],
    "java": [
        (105, -6), (108, -6.5), (111, -6.9), (114, -7.5), (114, -8.5),
        (110, -8), (106, -7),
    ],
    "borneo": [
        (109, 1), (111, 3), (114, 4.5), (117, 7), (119, 5), (118, 2),
        (117, -1), (115, -3.5), (112, -3.5), (110, -1.5),
    ],
    "sulawesi": [
        (119, 0.5), (121, 1), (123, 0.5), (122, -2), (121, -4), (120, -5.5),
        (119, -4), (120, -2),
    ],
    "new_guinea": [
        (131, -1), (134, -1.5), (137, -2), (140, -3), (144, -4), (147, -6),
        (147, -7), (144, -7.5), (141, -8.5), (138, -8), (135, -6), (132, -4),
        (130, -2),
    ],
    "philippines": [
        (120, 18.5), (122, 18), (122, 14), (124, 13), (125, 10), (126, 7),
        (124, 6), (122, 8), (121, 12), (119, 15),
    ],
    "madagascar": [
        (44, -16), (47, -15), (50, -15.8), (49.5, -19), (47, -24), (45, -25.5),
        (44, -23), (43.5, -20),
    ],
    "sri_lanka": [(80, 9.8), (81.8, 8.5), (81.5, 6.2), (80, 6), (79.8, 8)],
    "cuba": [(-84, 22.5), (-80, 23), (-77, 20.5), (-75, 20), (-78, 22), (-82, 23)],
    "nz_north": [
        (173, -34.5), (176, -37.5), (178, -37.8), (177, -39), (175, -41.5),
        (173, -39.5), (174, -37),
    ],
    "nz_south": [
        (173, -40.8), (174, -42), (173, -43.5), (171, -44.5), (168, -46.5),
        (166, -45.8), (168, -44), (171, -42),
    ],
    "antarctica": [
        (-180, -90), (180, -90), (180, -71), (150, -68), (120, -67), (90, -67),
        (60, -68), (30, -70), (0, -70), (-30, -72), (-58, -64), (-62, -66),
        (-68, -68), (-75, -72), (-90, -73), (-120, -74), (-150, -77),
        (-180, -78),
    ],
}

# inland water carved back out of the land union
WATER = {
    "hudson_bay": [
        (-95, 57), (-90, 57), (-85, 55), (-82, 55), (-82, 60), (-85, 64),
        (-90, 64), (-94, 62),
    ],
    "baltic": [
        (10, 54), (13, 54), (16, 54.5), (20, 55), (21, 57), (23, 59), (26, 60),
        (30, 60), (26, 61.5), (21, 61), (19, 63), (21, 65), (18, 63.5),
        (17, 61), (16, 58), (12, 56.5),
    ],
    "black_sea": [
        (28, 44), (33, 45), (36, 45), (39, 43), (41, 42), (36, 42), (33, 42),
        (29, 41), (27, 42),
    ],
    "caspian": [
        (47, 44), (50, 45), (52, 47), (54, 46), (53, 42), (54, 38), (52, 37),
        (50, 37), (49, 40),
    ],
}


def rasterize():
    lats = 90.0 - (np.arange(ROWS) + 0.5) * RES
    lons = -180.0 + (np.arange(COLS) + 0.5) * RES
    grid_lon, grid_lat = np.meshgrid(lons, lats)
    pts = np.column_stack([grid_lon.ravel(), grid_lat.ravel()])
    land = np.zeros(len(pts), dtype=bool)
    for verts in LAND.values():
        land |= Path(verts).contains_points(pts)
    for verts in WATER.values():
        land &= ~Path(verts).contains_points(pts)
    return land.reshape(ROWS, COLS)


def main():
    mask = rasterize()
    out = sys.stdout
    out.write("landmask v1\n")
    out.write(f"resolution_deg {RES}\n")
    out.write(f"rows {ROWS}\n")
    out.write(f"cols {COLS}\n")
    for i in range(ROWS):
        out.write("".join("1" if v else "0" for v in mask[i]) + "\n")
    frac = mask.mean()
    print(f"land fraction: {frac:.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
