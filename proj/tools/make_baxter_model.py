#!/usr/bin/env python3
"""Writes data/baxter_model.json: twists, zero-configuration poses and joint
limits of a 7+7 Baxter-like dual arm, built from the publicly documented
joint frame offsets of the Baxter description package.

The whole model is shifted by BASE_OFFSET and carries a tool length of
TOOL_LENGTH past the last wrist frame; both were fitted so published joint
values for this robot land close to their published gripper poses.
"""
import json
import math
import pathlib
import re

import numpy as np
from scipy.spatial.transform import Rotation

HALF_PI = math.pi / 2
MOUNT = ((0.024645, 0.219645, 0.118588), 0.7854)
CHAIN = [
    ((0.055695, 0.0, 0.011038), (0.0, 0.0, 0.0)),
    ((0.069, 0.0, 0.27035), (-HALF_PI, 0.0, 0.0)),
    ((0.102, 0.0, 0.0), (HALF_PI, 0.0, HALF_PI)),
    ((0.069, 0.0, 0.26242), (-HALF_PI, -HALF_PI, 0.0)),
    ((0.10359, 0.0, 0.0), (HALF_PI, 0.0, HALF_PI)),
    ((0.01, 0.0, 0.2707), (-HALF_PI, -HALF_PI, 0.0)),
    ((0.115975, 0.0, 0.0), (HALF_PI, 0.0, HALF_PI)),
]
LIMITS = [
    (-1.70168, 1.70168),
    (-2.147, 1.047),
    (-3.05418, 3.05418),
    (-0.05, 2.618),
    (-3.059, 3.059),
    (-1.5708, 2.094),
    (-3.059, 3.059),
]
TOOL_LENGTH = 0.2292
BASE_OFFSET = np.array([-0.0406, 0.0259, -0.0094])
REDUNDANCY_JOINT = 2


def frame(xyz, rpy):
    m = np.eye(4)
    m[:3, :3] = Rotation.from_euler("xyz", rpy).as_matrix()
    m[:3, 3] = xyz
    return m


def clean(values):
    return [round(float(x), 12) + 0.0 for x in values]


def dump(model):
    # one line per numeric row keeps the file readable
    text = json.dumps(model, indent=2)
    return re.sub(r"\[\s+([-0-9.e,\s]+?)\s+\]",
                  lambda m: "[" + ", ".join(m.group(1).split()).replace(",,", ",") + "]", text)


def arm(sign):
    (mx, my, mz), yaw = MOUNT
    m = frame((mx, sign * my, mz), (0.0, 0.0, sign * yaw))
    m[:3, 3] += BASE_OFFSET
    twists = []
    for xyz, rpy in CHAIN:
        m = m @ frame(xyz, rpy)
        w = m[:3, 2]
        q = m[:3, 3]
        twists.append(clean(np.r_[-np.cross(w, q), w]))
    g0 = m @ frame((0.0, 0.0, TOOL_LENGTH), (0.0, 0.0, 0.0))
    return {
        "twists": twists,
        "g0": [clean(row) for row in g0],
        "limits": [list(lim) for lim in LIMITS],
        "redundancy_joint": REDUNDANCY_JOINT,
    }


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "baxter_model.json"
    model = {"name": "baxter-like 7+7", "left": arm(1.0), "right": arm(-1.0)}
    out.write_text(dump(model) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
