#!/usr/bin/env python3
"""Generate the GMSH v2.2 fixture meshes shipped under tests/fixtures.

Requires the `gmsh` Python package. The generated files are committed, so
this script only needs to run when a fixture changes.

    python3 tools/fixtures/make_fixtures.py [output_dir]
"""

import math
import os
import sys

import gmsh

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
    os.path.dirname(__file__), "..", "..", "tests", "fixtures")

# Coastal basin: rectangle [0, W] x [-H, 0] with a half-disc of open sea on top.
W = 5.0
H = 5.0


def start(name):
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.option.setNumber("Mesh.MshFileVersion", 2.2)
    gmsh.option.setNumber("Mesh.Binary", 0)
    gmsh.option.setNumber("Mesh.Algorithm", 6)
    gmsh.option.setNumber("Mesh.RandomSeed", 1)
    gmsh.model.add(name)


def finish(path):
    gmsh.model.mesh.generate(2)
    gmsh.write(os.path.join(OUT, path))
    gmsh.finalize()


def basin_outline(h_out):
    """Curves of the half-disc basin; returns (loop, tags per boundary)."""
    geo = gmsh.model.geo
    p0 = geo.addPoint(0.0, -H, 0.0, h_out)
    p1 = geo.addPoint(W, -H, 0.0, h_out)
    p2 = geo.addPoint(W, 0.0, 0.0, h_out)
    p3 = geo.addPoint(0.0, 0.0, 0.0, h_out)
    pc = geo.addPoint(W / 2, 0.0, 0.0, h_out)
    ptop = geo.addPoint(W / 2, W / 2, 0.0, h_out)
    coast = geo.addLine(p0, p1)
    right = geo.addLine(p1, p2)
    arc1 = geo.addCircleArc(p2, pc, ptop)
    arc2 = geo.addCircleArc(ptop, pc, p3)
    left = geo.addLine(p3, p0)
    loop = geo.addCurveLoop([coast, right, arc1, arc2, left])
    return loop, {"G1": [coast], "G2": [left], "G3": [right], "G4": [arc1, arc2]}


def make_periodic(left, right, dx):
    gmsh.model.geo.synchronize()
    # right = left translated by +dx (curve orientation reversed in the loop).
    gmsh.model.mesh.setPeriodic(1, [right], [left],
                                [1, 0, 0, dx, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1])


def size_field(curves, h_min, h_max, d_min, d_max):
    f = gmsh.model.mesh.field
    dist = f.add("Distance")
    f.setNumbers(dist, "CurvesList", curves)
    f.setNumber(dist, "Sampling", 400)
    th = f.add("Threshold")
    f.setNumber(th, "InField", dist)
    f.setNumber(th, "SizeMin", h_min)
    f.setNumber(th, "SizeMax", h_max)
    f.setNumber(th, "DistMin", d_min)
    f.setNumber(th, "DistMax", d_max)
    f.setAsBackgroundMesh(th)
    gmsh.option.setNumber("Mesh.MeshSizeFromPoints", 0)
    gmsh.option.setNumber("Mesh.MeshSizeExtendFromBoundary", 0)
    gmsh.option.setNumber("Mesh.MeshSizeFromCurvature", 0)


def circle_curves(cx, cy, r, h):
    geo = gmsh.model.geo
    c = geo.addPoint(cx, cy, 0.0, h)
    pts = [geo.addPoint(cx + r * math.cos(a), cy + r * math.sin(a), 0.0, h)
           for a in (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)]
    return [geo.addCircleArc(pts[i], c, pts[(i + 1) % 4]) for i in range(4)]


def rounded_rect_curves(cx, cy, w, hgt, rad, h):
    geo = gmsh.model.geo
    x0, x1 = cx - w / 2, cx + w / 2
    y0, y1 = cy - hgt / 2, cy + hgt / 2
    if rad <= 0.0:
        p = [geo.addPoint(x, y, 0.0, h) for x, y in
             ((x0, y0), (x1, y0), (x1, y1), (x0, y1))]
        return [geo.addLine(p[i], p[(i + 1) % 4]) for i in range(4)]
    corners = [(x1 - rad, y0 + rad, -0.5 * math.pi, 0.0),
               (x1 - rad, y1 - rad, 0.0, 0.5 * math.pi),
               (x0 + rad, y1 - rad, 0.5 * math.pi, math.pi),
               (x0 + rad, y0 + rad, math.pi, 1.5 * math.pi)]
    curves = []
    first = prev = None
    for (ccx, ccy, a0, a1) in corners:
        c = geo.addPoint(ccx, ccy, 0.0, h)
        pa = geo.addPoint(ccx + rad * math.cos(a0), ccy + rad * math.sin(a0), 0.0, h)
        pb = geo.addPoint(ccx + rad * math.cos(a1), ccy + rad * math.sin(a1), 0.0, h)
        if prev is not None:
            curves.append(geo.addLine(prev, pa))
        else:
            first = pa
        curves.append(geo.addCircleArc(pa, c, pb))
        prev = pb
    curves.append(geo.addLine(prev, first))
    return curves


def physical(tags_by_name, omega=None, d=None):
    gmsh.model.geo.synchronize()
    for name, curves in tags_by_name.items():
        gmsh.model.addPhysicalGroup(1, curves, name=name)
    if omega is not None:
        gmsh.model.addPhysicalGroup(2, omega, name="OMEGA")
    if d is not None:
        gmsh.model.addPhysicalGroup(2, d, name="D")


def basin(path, obstacle, h_obs, h_out, d_min=0.3, d_max=1.5, transmissive=False):
    """Half-disc basin with an optional obstacle.

    obstacle: None, ("circle", cx, cy, r) or ("rect", cx, cy, w, h, corner_radius).
    """
    start(path)
    loop, tags = basin_outline(h_out)
    geo = gmsh.model.geo
    holes = []
    obs = []
    if obstacle is not None:
        if obstacle[0] == "circle":
            obs = circle_curves(*obstacle[1:], h_obs)
        else:
            obs = rounded_rect_curves(*obstacle[1:], h_obs)
        holes.append(geo.addCurveLoop(obs))
        tags["G5"] = obs
    omega = geo.addPlaneSurface([loop] + holes)
    d_surf = None
    if transmissive:
        d_surf = geo.addPlaneSurface([holes[0]])
    make_periodic(tags["G2"][0], tags["G3"][0], W)
    if obs:
        size_field(obs, h_obs, h_out, d_min, d_max)
    physical(tags, omega=[omega], d=[d_surf] if d_surf else None)
    finish(path)


def ldb(path, h, h_obs):
    """Langue-de-Barbarie-like strip: wavy mainland, two offshore islands,
    one small island obstacle, straight open-sea boundary on top."""
    start(path)
    geo = gmsh.model.geo
    Lx, Ly = 2.0, 1.4
    n = 40
    coast_pts = []
    for i in range(n + 1):
        x = Lx * i / n
        y = 0.08 * math.sin(2 * math.pi * x / Lx) + 0.04 * math.sin(6 * math.pi * x / Lx)
        coast_pts.append(geo.addPoint(x, y, 0.0, h))
    tl = geo.addPoint(0.0, Ly, 0.0, h)
    tr = geo.addPoint(Lx, Ly, 0.0, h)
    coast = geo.addSpline(coast_pts)
    right = geo.addLine(coast_pts[-1], tr)
    top = geo.addLine(tr, tl)
    left = geo.addLine(tl, coast_pts[0])
    outer = geo.addCurveLoop([coast, right, top, left])

    def island(cx, cy, a, b, tilt, hh):
        m = 24
        pts = []
        for j in range(m):
            t = 2 * math.pi * j / m
            x = a * math.cos(t)
            y = b * math.sin(t)
            pts.append(geo.addPoint(cx + x * math.cos(tilt) - y * math.sin(tilt),
                                    cy + x * math.sin(tilt) + y * math.cos(tilt), 0.0, hh))
        return [geo.addSpline(pts + [pts[0]])]

    isl1 = island(0.55, 0.42, 0.32, 0.05, 0.12, h)
    isl2 = island(1.45, 0.5, 0.3, 0.05, -0.1, h)
    obs = island(1.05, 0.8, 0.12, 0.05, 0.0, h_obs)
    loops = [outer] + [geo.addCurveLoop(c) for c in (isl1, isl2, obs)]
    omega = geo.addPlaneSurface(loops)
    make_periodic(left, right, Lx)
    size_field(obs, h_obs, h, 0.1, 0.4)
    physical({"G1": [coast] + isl1 + isl2, "G2": [left], "G3": [right],
              "G4": [top], "G5": obs}, omega=[omega])
    finish(path)


def main():
    os.makedirs(OUT, exist_ok=True)
    circle = ("circle", 2.5, -4.0, 0.5)
    # 128 segments on the obstacle circle.
    basin("basin_circle.msh", circle, 2 * math.pi * 0.5 / 128, 0.09)
    basin("basin_circle_fine.msh", circle, 0.02, 0.08, d_min=0.25, d_max=1.0)
    basin("basin_circle_finer.msh", circle, 0.01, 0.08, d_min=0.25, d_max=1.0)
    basin("basin_free.msh", None, 0.09, 0.09)
    basin("basin_rect.msh", ("rect", 2.5, -4.0, 1.0, 0.3, 0.0), 0.025, 0.07)
    basin("basin_rect_coarse.msh", ("rect", 2.5, -4.0, 1.0, 0.3, 0.0), 0.04, 0.1)
    smooth = ("rect", 2.5, -4.0, 1.0, 0.4, 0.1)
    for i, hs in enumerate((0.04, 0.02, 0.01)):
        basin("basin_trans_%d.msh" % (i + 1), smooth, hs, 0.08, d_min=0.2, d_max=1.0,
              transmissive=True)
    ldb("ldb.msh", 0.022, 0.008)


if __name__ == "__main__":
    main()
