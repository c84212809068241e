#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace hsim {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

// Indexed triangle mesh. Every face references three distinct, in-range
// vertices and has strictly positive area; every vertex belongs to a face and
// the face graph is edge-connected. Construct through make_mesh() or
// load_mesh() to get these guarantees.
struct TriangleMesh {
  std::vector<Vec3> positions;
  std::vector<Face> faces;
  // Faces removed during construction because they had zero area or
  // repeated indices.
  std::size_t dropped_faces = 0;

  std::size_t n_vertices() const { return positions.size(); }
  std::size_t n_faces() const { return faces.size(); }
};

enum class MeshFormat { Off, Obj };

// Validates raw geometry and returns a mesh satisfying the TriangleMesh
// invariants. Degenerate faces are dropped and counted.
TriangleMesh make_mesh(std::vector<Vec3> positions, std::vector<Face> faces);

TriangleMesh read_off(std::istream& in);
TriangleMesh read_obj(std::istream& in);

// Format is inferred from the extension when not given.
TriangleMesh load_mesh(const std::filesystem::path& path,
                       std::optional<MeshFormat> format = std::nullopt);

void write_off(std::ostream& out, const TriangleMesh& mesh);
void save_off(const std::filesystem::path& path, const TriangleMesh& mesh);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const TriangleMesh& mesh);

// Vertices incident to an edge that belongs to exactly one face.
std::vector<bool> boundary_vertex_mask(const TriangleMesh& mesh);

// Undirected edge graph in compressed adjacency form, weighted by Euclidean
// edge length.
class EdgeGraph {
public:
  struct Neighbor {
    int vertex;
    double length;
  };

  EdgeGraph() = default;
  EdgeGraph(std::vector<std::size_t> offsets, std::vector<Neighbor> neighbors);

  std::size_t n_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t n_edges() const { return neighbors_.size() / 2; }

  std::span<const Neighbor> neighbors(std::size_t v) const {
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> neighbors_;
};

EdgeGraph build_edge_graph(const TriangleMesh& mesh);

} // namespace hsim
