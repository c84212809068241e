#include "hsim/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace hsim::shapes {

TriangleMesh icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : v)
    p.normalize();

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto split = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end())
        return it->second;
      v.push_back((0.5 * (v[a] + v[b])).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(4 * f.size());
    for (const Face& tri : f) {
      const int ab = split(tri[0], tri[1]);
      const int bc = split(tri[1], tri[2]);
      const int ca = split(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return make_mesh(std::move(v), std::move(f));
}

TriangleMesh cube_sphere(int cells) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  std::map<std::array<long, 3>, int> index;
  // Grid points on the cube surface are keyed by integer coordinates so that
  // shared edges and corners are welded.
  auto vertex = [&](long x, long y, long z) {
    const std::array<long, 3> key{x, y, z};
    auto it = index.find(key);
    if (it != index.end())
      return it->second;
    const double h = static_cast<double>(cells);
    const Vec3 p(2.0 * x / h - 1.0, 2.0 * y / h - 1.0, 2.0 * z / h - 1.0);
    v.push_back(p.normalized());
    const int id = static_cast<int>(v.size()) - 1;
    index.emplace(key, id);
    return id;
  };
  const long c = cells;
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side)
      for (long i = 0; i < c; ++i)
        for (long j = 0; j < c; ++j) {
          auto at = [&](long a, long b) {
            std::array<long, 3> q{};
            q[axis] = side ? c : 0;
            q[(axis + 1) % 3] = a;
            q[(axis + 2) % 3] = b;
            return vertex(q[0], q[1], q[2]);
          };
          const int v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
          // Orientation is irrelevant for the operators; keep it consistent per face.
          if (side) {
            f.push_back({v00, v10, v11});
            f.push_back({v00, v11, v01});
          } else {
            f.push_back({v00, v11, v10});
            f.push_back({v00, v01, v11});
          }
        }
  return make_mesh(std::move(v), std::move(f));
}

TriangleMesh torus(int ring_segments, int tube_segments, double ring_radius, double tube_radius) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  v.reserve(static_cast<std::size_t>(ring_segments) * tube_segments);
  for (int i = 0; i < ring_segments; ++i) {
    const double u = 2.0 * std::numbers::pi * i / ring_segments;
    for (int j = 0; j < tube_segments; ++j) {
      const double w = 2.0 * std::numbers::pi * j / tube_segments;
      const double r = ring_radius + tube_radius * std::cos(w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), tube_radius * std::sin(w));
    }
  }
  auto id = [&](int i, int j) { return (i % ring_segments) * tube_segments + (j % tube_segments); };
  for (int i = 0; i < ring_segments; ++i)
    for (int j = 0; j < tube_segments; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return make_mesh(std::move(v), std::move(f));
}

TriangleMesh hex_disk(int rings) {
  // Axial hexagonal lattice clipped to a hexagon, then mapped to the disk by
  // radial rescaling of each ring.
  std::vector<Vec3> v;
  std::vector<Face> f;
  std::map<std::pair<int, int>, int> index;
  const double sqrt3 = std::sqrt(3.0);
  for (int q = -rings; q <= rings; ++q)
    for (int r = std::max(-rings, -q - rings); r <= std::min(rings, -q + rings); ++r) {
      const int ring = std::max({std::abs(q), std::abs(r), std::abs(q + r)});
      Vec3 p(q + 0.5 * r, 0.5 * sqrt3 * r, 0.0);
      if (ring > 0)
        p *= static_cast<double>(ring) / (rings * p.norm());
      index.emplace(std::make_pair(q, r), static_cast<int>(v.size()));
      v.push_back(p);
    }
  auto find = [&](int q, int r) {
    auto it = index.find({q, r});
    return it == index.end() ? -1 : it->second;
  };
  for (const auto& [key, a] : index) {
    const auto [q, r] = key;
    const int b = find(q + 1, r), c = find(q, r + 1), d = find(q - 1, r + 1);
    if (b >= 0 && c >= 0)
      f.push_back({a, b, c});
    if (c >= 0 && d >= 0)
      f.push_back({a, c, d});
  }
  return make_mesh(std::move(v), std::move(f));
}

TriangleMesh jitter(const TriangleMesh& mesh, double fraction, std::uint64_t seed) {
  std::vector<double> shortest(mesh.n_vertices(), std::numeric_limits<double>::infinity());
  for (const Face& face : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = face[k], b = face[(k + 1) % 3];
      const double len = (mesh.positions[a] - mesh.positions[b]).norm();
      shortest[a] = std::min(shortest[a], len);
      shortest[b] = std::min(shortest[b], len);
    }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vec3> positions = mesh.positions;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Vec3 d;
    do {
      d = Vec3(unit(rng), unit(rng), unit(rng));
    } while (d.squaredNorm() > 1.0);
    positions[i] += fraction * shortest[i] * d;
  }
  return make_mesh(std::move(positions), mesh.faces);
}

TriangleMesh bumpy(const TriangleMesh& mesh, double amplitude) {
  std::vector<Vec3> positions = mesh.positions;
  for (Vec3& p : positions) {
    const Vec3 d = p.normalized();
    const double field = std::sin(3.0 * d.x() + 1.0) * std::cos(2.0 * d.y()) + 0.5 * std::sin(4.0 * d.z());
    p *= 1.0 + amplitude * field;
  }
  return make_mesh(std::move(positions), mesh.faces);
}

} // namespace hsim::shapes
