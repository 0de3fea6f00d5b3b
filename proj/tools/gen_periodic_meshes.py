#!/usr/bin/env python3
"""Generate doubly-periodic unstructured triangulations of the unit square.

Writes gmsh MSH ASCII v2.2 files whose boundary nodes occur in matching
pairs (x=0/x=1, y=0/y=1), as expected by the swfem MSH reader.

    python3 tools/gen_periodic_meshes.py --out tests/data 8 12 16 24 32
"""
import argparse
import os

import gmsh


def make_mesh(inverse_size, path, seed=0):
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.option.setNumber("Mesh.RandomSeed", seed)
    gmsh.model.add("torus")
    lc = 1.0 / inverse_size
    occ = gmsh.model.occ
    occ.addRectangle(0, 0, 0, 1, 1)
    occ.synchronize()
    gmsh.model.mesh.setSize(gmsh.model.getEntities(0), lc)

    # Curve tags for the rectangle: 1 bottom, 2 right, 3 top, 4 left.
    translate_x = [1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]
    translate_y = [1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1]
    gmsh.model.mesh.setPeriodic(1, [2], [4], translate_x)
    gmsh.model.mesh.setPeriodic(1, [3], [1], translate_y)

    gmsh.option.setNumber("Mesh.Algorithm", 5)  # Delaunay
    gmsh.model.mesh.generate(2)
    gmsh.option.setNumber("Mesh.MshFileVersion", 2.2)
    gmsh.option.setNumber("Mesh.Binary", 0)
    gmsh.option.setNumber("Mesh.SaveAll", 1)
    gmsh.write(path)
    _, tags, _ = gmsh.model.mesh.getElements(2)
    count = sum(len(t) for t in tags)
    gmsh.finalize()
    return count


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("sizes", type=int, nargs="+",
                        help="inverse target element sizes, e.g. 8 16 32")
    parser.add_argument("--out", default=".")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for n in args.sizes:
        path = os.path.join(args.out, f"periodic_{n}.msh")
        print(f"{path}: {make_mesh(n, path)} triangles")


if __name__ == "__main__":
    main()
