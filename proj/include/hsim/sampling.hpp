#pragma once

#include "hsim/mesh.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace hsim {

struct VertexDistance {
  int vertex;
  double distance;
};

// Reusable Dijkstra state. Distances outside the last search are +inf; only
// touched entries are reset between searches, so repeated small searches on a
// large graph stay proportional to the size of the explored ball.
class DijkstraWorkspace {
public:
  explicit DijkstraWorkspace(std::size_t n_vertices);

  // Exact graph distances from `source` for every vertex with distance <=
  // radius, in the order vertices were settled.
  const std::vector<VertexDistance>& within(const EdgeGraph& graph, int source, double radius);

private:
  std::vector<double> distance_;
  std::vector<int> touched_;
  std::vector<VertexDistance> settled_;
};

std::vector<VertexDistance> dijkstra_within(const EdgeGraph& graph, int source, double radius);

// Distance from every vertex to its nearest source, and the index (into
// `sources`) of that source. Unreachable vertices get +inf and -1.
struct DistanceField {
  std::vector<double> distance;
  std::vector<int> nearest;
};
DistanceField multi_source_dijkstra(const EdgeGraph& graph, std::span<const int> sources);

struct SeededStart {
  std::uint64_t seed;
};
struct FixedStart {
  int vertex;
};
using SamplingStart = std::variant<SeededStart, FixedStart>;

// Nested farthest-point samples. `order` lists the samples in insertion order;
// the level with k samples is the prefix of length k, which makes the sets
// nested by construction.
struct VertexSampling {
  std::vector<int> order;
  // Requested sizes, coarsest first.
  std::vector<std::size_t> sizes;
  // Graph distance from each vertex to the final (largest) sample set.
  std::vector<double> distance_field;

  std::span<const int> level(std::size_t k) const { return {order.data(), sizes.at(k)}; }
};

// Greedy farthest-point sampling under graph distance. `sizes` must be strictly
// increasing (coarsest first); the distance field is maintained incrementally
// with a pruned Dijkstra from each new sample. Ties pick the smallest vertex
// index.
VertexSampling farthest_point_sample(const EdgeGraph& graph, std::span<const std::size_t> sizes,
                                     SamplingStart start);

} // namespace hsim
