#!/usr/bin/env python3
# Copyright 2026 The DMHE Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes data/benchmark_model.json for the reactor-separator process.

The composite matrices of the discrete-time linearized model (h = 0.02 h)
are cut into three vessels of three states each: (x_A, x_B, T).
"""

import json
import re
import pathlib

A = [
    [0.1401, -0.0079, -0.6150, 0.0925, -0.0034, -0.1887, 0.1978, -0.0055, -0.3139],
    [0.2102, 0.3358, 0.1527, 0.0394, 0.1134, 0.0731, 0.1076, 0.2631, 0.0952],
    [0.0395, 0.0059, 0.5144, 0.0135, 0.0022, 0.1789, 0.0298, 0.0055, 0.3992],
    [0.1269, -0.0064, -0.6433, 0.0802, -0.0031, -0.2113, 0.1673, -0.0053, -0.2957],
    [0.2529, 0.3696, 0.1645, 0.0580, 0.1203, 0.0773, 0.0882, 0.2067, 0.0968],
    [0.0423, 0.0059, 0.5551, 0.0155, 0.0019, 0.1889, 0.0302, 0.0039, 0.3383],
    [0.0660, 0.0061, -0.1895, 0.0464, 0.005, -0.0708, 0.0857, 0.0110, -0.0723],
    [0.2793, 0.3550, -0.0335, 0.1851, 0.2450, -0.0069, 0.3195, 0.4402, 0.0020],
    [0.0236, 0.0055, 0.4111, 0.0107, 0.0038, 0.2434, 0.0133, 0.0074, 0.3927],
]
B = [
    [-0.0154, -0.0021, -0.0053],
    [0.0050, 0.0010, 0.0019],
    [0.0243, 0.0023, 0.0106],
    [-0.0135, -0.0051, -0.0042],
    [0.0047, 0.0024, 0.0016],
    [0.0174, 0.0098, 0.0016],
    [-0.0031, -0.0013, -0.0008],
    [0.0002, 0.0003, 0.0001],
    [0.0076, 0.0058, 0.0210],
]
# Temperature of each vessel is measured.
MEASURED = [2, 5, 8]
STATES = 3


def block(m, rows, cols):
    return [[m[r][c] for c in cols] for r in rows]


def main():
    subsystems = []
    for i in range(3):
        rows = range(STATES * i, STATES * (i + 1))
        entry = {
            "id": i,
            "A": block(A, rows, rows),
            "B": block(B, rows, [i]),
            "C": [[1.0 if STATES * i + c == MEASURED[i] else 0.0 for c in range(STATES)]],
            "A_coupling": {},
            "B_coupling": {},
        }
        for j in range(3):
            if j == i:
                continue
            cols = range(STATES * j, STATES * (j + 1))
            entry["A_coupling"][str(j)] = block(A, rows, cols)
            entry["B_coupling"][str(j)] = block(B, rows, [j])
        subsystems.append(entry)
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "benchmark_model.json"
    text = json.dumps({"subsystems": subsystems}, indent=2)
    # One matrix row per line.
    text = re.sub(r"\[\s+([-0-9.,\s]+?)\s+\]",
                  lambda m: "[" + ", ".join(m.group(1).split()).replace(",,", ",") + "]",
                  text)
    out.write_text(text + "\n")


if __name__ == "__main__":
    main()
