#include "hsim/sampling.hpp"

#include "hsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>

namespace hsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct QueueEntry {
  double distance;
  int vertex;
  bool operator>(const QueueEntry& o) const {
    return distance > o.distance || (distance == o.distance && vertex > o.vertex);
  }
};
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

// Max-heap order for the farthest-point query: larger distance first, then
// smaller index.
struct FarthestFirst {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    return a.distance < b.distance || (a.distance == b.distance && a.vertex > b.vertex);
  }
};

} // namespace

DijkstraWorkspace::DijkstraWorkspace(std::size_t n_vertices) : distance_(n_vertices, kInf) {}

const std::vector<VertexDistance>& DijkstraWorkspace::within(const EdgeGraph& graph, int source,
                                                             double radius) {
  for (int v : touched_)
    distance_[v] = kInf;
  touched_.clear();
  settled_.clear();

  MinQueue queue;
  distance_[source] = 0.0;
  touched_.push_back(source);
  queue.push({0.0, source});
  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    if (top.distance > distance_[top.vertex])
      continue;
    settled_.push_back({top.vertex, top.distance});
    for (const auto& nb : graph.neighbors(top.vertex)) {
      const double d = top.distance + nb.length;
      if (d <= radius && d < distance_[nb.vertex]) {
        if (distance_[nb.vertex] == kInf)
          touched_.push_back(nb.vertex);
        distance_[nb.vertex] = d;
        queue.push({d, nb.vertex});
      }
    }
  }
  return settled_;
}

std::vector<VertexDistance> dijkstra_within(const EdgeGraph& graph, int source, double radius) {
  if (source < 0 || static_cast<std::size_t>(source) >= graph.n_vertices())
    throw Error(ErrorKind::Size, "Dijkstra source out of range");
  DijkstraWorkspace ws(graph.n_vertices());
  return ws.within(graph, source, radius);
}

DistanceField multi_source_dijkstra(const EdgeGraph& graph, std::span<const int> sources) {
  DistanceField field{std::vector<double>(graph.n_vertices(), kInf),
                      std::vector<int>(graph.n_vertices(), -1)};
  MinQueue queue;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const int s = sources[k];
    if (field.distance[s] > 0.0) {
      field.distance[s] = 0.0;
      field.nearest[s] = static_cast<int>(k);
      queue.push({0.0, s});
    }
  }
  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    if (top.distance > field.distance[top.vertex])
      continue;
    for (const auto& nb : graph.neighbors(top.vertex)) {
      const double d = top.distance + nb.length;
      if (d < field.distance[nb.vertex]) {
        field.distance[nb.vertex] = d;
        field.nearest[nb.vertex] = field.nearest[top.vertex];
        queue.push({d, nb.vertex});
      }
    }
  }
  return field;
}

VertexSampling farthest_point_sample(const EdgeGraph& graph, std::span<const std::size_t> sizes,
                                     SamplingStart start) {
  const std::size_t n = graph.n_vertices();
  if (n == 0)
    throw Error(ErrorKind::EmptyMesh, "cannot sample an empty graph");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0 || (k > 0 && sizes[k] <= sizes[k - 1]))
      throw Error(ErrorKind::Size, "sample sizes must be positive and strictly increasing");
  }
  if (!sizes.empty() && sizes.back() > n)
    throw Error(ErrorKind::Size, "requested " + std::to_string(sizes.back()) + " samples from " +
                                     std::to_string(n) + " vertices");

  int first = 0;
  if (const auto* fixed = std::get_if<FixedStart>(&start)) {
    if (fixed->vertex < 0 || static_cast<std::size_t>(fixed->vertex) >= n)
      throw Error(ErrorKind::Size, "start vertex out of range");
    first = fixed->vertex;
  } else {
    std::mt19937_64 rng(std::get<SeededStart>(start).seed);
    first = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  }

  VertexSampling sampling;
  sampling.sizes.assign(sizes.begin(), sizes.end());
  sampling.distance_field.assign(n, kInf);
  std::vector<double>& field = sampling.distance_field;
  const std::size_t total = sizes.empty() ? 1 : sizes.back();
  sampling.order.reserve(total);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, FarthestFirst> farthest;
  MinQueue queue;

  // Pruned Dijkstra from a new sample: only vertices that get strictly closer
  // are updated and expanded, so the work stays local to the new sample's
  // Voronoi cell.
  std::vector<bool> sampled(n, false);
  auto insert = [&](int s) {
    sampled[s] = true;
    sampling.order.push_back(s);
    field[s] = 0.0;
    queue.push({0.0, s});
    while (!queue.empty()) {
      const QueueEntry top = queue.top();
      queue.pop();
      if (top.distance > field[top.vertex])
        continue;
      for (const auto& nb : graph.neighbors(top.vertex)) {
        const double d = top.distance + nb.length;
        if (d < field[nb.vertex]) {
          field[nb.vertex] = d;
          queue.push({d, nb.vertex});
          farthest.push({d, nb.vertex});
        }
      }
    }
  };

  insert(first);
  for (std::size_t v = 0; v < n; ++v)
    if (field[v] == kInf)
      throw Error(ErrorKind::Disconnected,
                  "vertex " + std::to_string(v) + " is unreachable from the start vertex");

  while (sampling.order.size() < total) {
    // Drop stale heap entries whose distance has since decreased.
    while (sampled[farthest.top().vertex] ||
           farthest.top().distance != field[farthest.top().vertex])
      farthest.pop();
    insert(farthest.top().vertex);
  }
  return sampling;
}

} // namespace hsim
