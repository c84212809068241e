#include "hsim/mesh.hpp"

#include "hsim/error.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

namespace hsim {

namespace {

// Strips '#' comments and surrounding whitespace.
std::string clean_line(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Reads the next non-empty, comment-stripped line; false at end of input.
bool next_line(std::istream& in, std::string& out, std::size_t& line_no) {
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    out = clean_line(raw);
    if (!out.empty())
      return true;
  }
  return false;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

void append_fan(const std::vector<int>& polygon, std::vector<Face>& faces) {
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k)
    faces.push_back({polygon[0], polygon[k], polygon[k + 1]});
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

} // namespace

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

TriangleMesh make_mesh(std::vector<Vec3> positions, std::vector<Face> faces) {
  const int n = static_cast<int>(positions.size());
  if (n == 0 || faces.empty())
    throw Error(ErrorKind::EmptyMesh, "mesh has no vertices or no faces");

  for (std::size_t f = 0; f < faces.size(); ++f)
    for (int v : faces[f])
      if (v < 0 || v >= n)
        throw Error(ErrorKind::Topology, "face " + std::to_string(f) + " references vertex " +
                                             std::to_string(v) + " of " + std::to_string(n));

  TriangleMesh mesh;
  mesh.faces.reserve(faces.size());
  for (const Face& f : faces) {
    const bool repeated = f[0] == f[1] || f[1] == f[2] || f[0] == f[2];
    if (!repeated) {
      const Vec3& a = positions[f[0]];
      const Vec3& b = positions[f[1]];
      const Vec3& c = positions[f[2]];
      const double longest =
          std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
      if (triangle_area(a, b, c) > 1e-14 * longest) {
        mesh.faces.push_back(f);
        continue;
      }
    }
    ++mesh.dropped_faces;
  }
  if (mesh.faces.empty())
    throw Error(ErrorKind::EmptyMesh, "all faces are degenerate");

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> referenced(n, false);
  for (const Face& f : mesh.faces) {
    for (int v : f)
      referenced[v] = true;
    for (int k = 1; k < 3; ++k) {
      const int a = find_root(parent, f[0]);
      const int b = find_root(parent, f[k]);
      if (a != b)
        parent[std::max(a, b)] = std::min(a, b);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!referenced[v])
      throw Error(ErrorKind::Disconnected,
                  "vertex " + std::to_string(v) + " is not referenced by any face");
    if (find_root(parent, v) != 0)
      throw Error(ErrorKind::Disconnected,
                  "mesh is not edge-connected (vertex " + std::to_string(v) + ")");
  }

  mesh.positions = std::move(positions);
  return mesh;
}

TriangleMesh read_off(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  if (!next_line(in, line, line_no))
    throw Error(ErrorKind::Parse, "empty OFF input");

  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF")
    parse_fail(line_no, "expected OFF header, got '" + magic + "'");

  // Counts may follow the header on the same line.
  std::string rest;
  std::getline(header, rest);
  rest = clean_line(rest);
  if (rest.empty() && !next_line(in, rest, line_no))
    parse_fail(line_no, "missing counts line");

  long long nv = -1, nf = -1;
  {
    std::istringstream counts(rest);
    if (!(counts >> nv >> nf) || nv < 0 || nf < 0)
      parse_fail(line_no, "malformed counts line");
  }

  std::vector<Vec3> positions(static_cast<std::size_t>(nv));
  for (auto& p : positions) {
    if (!next_line(in, line, line_no))
      parse_fail(line_no, "unexpected end of vertex list");
    std::istringstream s(line);
    if (!(s >> p.x() >> p.y() >> p.z()))
      parse_fail(line_no, "malformed vertex");
  }

  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(nf));
  std::vector<int> polygon;
  for (long long f = 0; f < nf; ++f) {
    if (!next_line(in, line, line_no))
      parse_fail(line_no, "unexpected end of face list");
    std::istringstream s(line);
    int k = 0;
    if (!(s >> k) || k < 3)
      parse_fail(line_no, "malformed face");
    polygon.resize(k);
    for (int& v : polygon)
      if (!(s >> v))
        parse_fail(line_no, "face has fewer indices than declared");
    append_fan(polygon, faces);
  }
  return make_mesh(std::move(positions), std::move(faces));
}

TriangleMesh read_obj(std::istream& in) {
  std::vector<Vec3> positions;
  std::vector<Face> faces;
  std::vector<int> polygon;
  std::size_t line_no = 0;
  std::string line;
  while (next_line(in, line, line_no)) {
    std::istringstream s(line);
    std::string tag;
    s >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(s >> p.x() >> p.y() >> p.z()))
        parse_fail(line_no, "malformed vertex");
      positions.push_back(p);
    } else if (tag == "f") {
      polygon.clear();
      std::string token;
      while (s >> token) {
        // v, v/vt, v//vn or v/vt/vn; only the position index matters.
        int idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoi(token.substr(0, token.find('/')), &used);
        } catch (const std::exception&) {
          parse_fail(line_no, "malformed face index '" + token + "'");
        }
        if (idx == 0)
          parse_fail(line_no, "OBJ indices are 1-based");
        polygon.push_back(idx > 0 ? idx - 1 : static_cast<int>(positions.size()) + idx);
      }
      if (polygon.size() < 3)
        parse_fail(line_no, "face with fewer than 3 vertices");
      append_fan(polygon, faces);
    }
  }
  return make_mesh(std::move(positions), std::move(faces));
}

TriangleMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format) {
  if (!format) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off")
      format = MeshFormat::Off;
    else if (ext == ".obj")
      format = MeshFormat::Obj;
    else
      throw Error(ErrorKind::Usage, "cannot infer mesh format from '" + path.string() + "'");
  }
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return *format == MeshFormat::Off ? read_off(in) : read_obj(in);
}

void write_off(std::ostream& out, const TriangleMesh& mesh) {
  out << "OFF\n" << mesh.n_vertices() << ' ' << mesh.n_faces() << " 0\n";
  out << std::setprecision(17);
  for (const Vec3& p : mesh.positions)
    out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Face& f : mesh.faces)
    out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void save_off(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  write_off(out, mesh);
}

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (const Face& f : mesh.faces)
    area += triangle_area(mesh.positions[f[0]], mesh.positions[f[1]], mesh.positions[f[2]]);
  return area;
}

std::vector<bool> boundary_vertex_mask(const TriangleMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(3 * mesh.n_faces());
  for (const Face& f : mesh.faces)
    for (int k = 0; k < 3; ++k)
      edges.emplace_back(std::minmax(f[k], f[(k + 1) % 3]));
  std::sort(edges.begin(), edges.end());

  std::vector<bool> mask(mesh.n_vertices(), false);
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i])
      ++j;
    if (j - i == 1) {
      mask[edges[i].first] = true;
      mask[edges[i].second] = true;
    }
    i = j;
  }
  return mask;
}

EdgeGraph::EdgeGraph(std::vector<std::size_t> offsets, std::vector<Neighbor> neighbors)
    : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

EdgeGraph build_edge_graph(const TriangleMesh& mesh) {
  const std::size_t n = mesh.n_vertices();
  std::vector<std::pair<int, int>> directed;
  directed.reserve(6 * mesh.n_faces());
  for (const Face& f : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      directed.emplace_back(f[k], f[(k + 1) % 3]);
      directed.emplace_back(f[(k + 1) % 3], f[k]);
    }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<EdgeGraph::Neighbor> neighbors;
  neighbors.reserve(directed.size());
  for (const auto& [a, b] : directed) {
    ++offsets[a + 1];
    neighbors.push_back({b, (mesh.positions[a] - mesh.positions[b]).norm()});
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return EdgeGraph(std::move(offsets), std::move(neighbors));
}

} // namespace hsim
