#pragma once

#include "hsim/mesh.hpp"

#include <cstdint>

// Procedural test surfaces. All are edge-connected, consistently oriented and
// free of degenerate faces.
namespace hsim::shapes {

// Loop-style subdivision of the regular icosahedron, projected onto the unit
// sphere. Vertex count is 10 * 4^subdivisions + 2.
TriangleMesh icosphere(int subdivisions);

// Gnomonic cube-sphere with `cells` quads per cube edge, on the unit sphere.
// Vertex count is 6 * cells^2 + 2.
TriangleMesh cube_sphere(int cells);

// Closed torus with `ring_segments * tube_segments` vertices.
TriangleMesh torus(int ring_segments, int tube_segments, double ring_radius = 1.0,
                   double tube_radius = 0.4);

// Planar disk of unit radius triangulated by concentric hexagonal rings.
// Vertex count is 1 + 3 * rings * (rings + 1); has a boundary.
TriangleMesh hex_disk(int rings);

// Moves every vertex by a uniformly random offset of at most `fraction` times
// its shortest incident edge. Breaks symmetries without creating flips for
// fraction < 0.25.
TriangleMesh jitter(const TriangleMesh& mesh, double fraction, std::uint64_t seed);

// Scales each vertex radially by 1 + amplitude * (low-frequency bump field).
TriangleMesh bumpy(const TriangleMesh& mesh, double amplitude);

} // namespace hsim::shapes
