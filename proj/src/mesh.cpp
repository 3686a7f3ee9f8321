#include "stfr/mesh.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace stfr {

namespace {

using FaceKey = std::pair<int, int>;

FaceKey make_key(int a, int b) { return a < b ? FaceKey{a, b} : FaceKey{b, a}; }

double signed_area(const std::vector<Point>& x, const std::array<int, 4>& q) {
  double a = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& p = x[static_cast<std::size_t>(q[static_cast<std::size_t>(i)])];
    const auto& r = x[static_cast<std::size_t>(q[static_cast<std::size_t>((i + 1) % 4)])];
    a += p[0] * r[1] - r[0] * p[1];
  }
  return 0.5 * a;
}

/// Faces that belong to exactly one element, as Dirichlet records.
std::vector<BoundaryFace> unmatched_faces(int dim, const std::vector<std::array<int, 4>>& elems) {
  std::map<FaceKey, std::pair<int, std::array<int, 2>>> count;
  static constexpr int quad_faces[4][2] = {{0, 3}, {1, 2}, {0, 1}, {3, 2}};
  for (const auto& e : elems) {
    if (dim == 1) {
      for (int f = 0; f < 2; ++f) {
        auto& c = count[{e[static_cast<std::size_t>(f)], -1}];
        c.first++;
        c.second = {e[static_cast<std::size_t>(f)], -1};
      }
    } else {
      for (const auto& qf : quad_faces) {
        const int a = e[static_cast<std::size_t>(qf[0])];
        const int b = e[static_cast<std::size_t>(qf[1])];
        auto& c = count[make_key(a, b)];
        c.first++;
        c.second = {a, b};
      }
    }
  }
  std::vector<BoundaryFace> out;
  for (const auto& [key, c] : count)
    if (c.first == 1) out.push_back(BoundaryFace{c.second, BoundaryKind::Dirichlet, -1});
  return out;
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Point> nodes, std::vector<std::array<int, 4>> elems,
           std::vector<BoundaryFace> bfaces)
    : dim_(dim), nodes_(std::move(nodes)), elems_(std::move(elems)), bfaces_(std::move(bfaces)) {
  if (dim_ != 1 && dim_ != 2) throw MeshError("mesh dimension must be 1 or 2");
  if (elems_.empty()) throw MeshError("mesh has no elements");
  for (std::size_t e = 0; e < elems_.size(); ++e) {
    for (int v = 0; v < nodes_per_elem(); ++v) {
      const int id = elems_[e][static_cast<std::size_t>(v)];
      if (id < 0 || id >= n_nodes()) throw MeshError("element " + std::to_string(e) + " references invalid node");
    }
    if (dim_ == 1) {
      if (nodes_[static_cast<std::size_t>(elems_[e][1])][0] <= nodes_[static_cast<std::size_t>(elems_[e][0])][0])
        throw MeshError("segment " + std::to_string(e) + " is not left-to-right");
    } else if (signed_area(nodes_, elems_[e]) <= 0.0) {
      throw MeshError("quad " + std::to_string(e) + " is not counter-clockwise");
    }
  }
  build_links();
}

std::array<int, 2> Mesh::face_vertices(int f) const {
  if (dim_ == 1) return {f, -1};
  static constexpr std::array<std::array<int, 2>, 4> quad_faces{{{0, 3}, {1, 2}, {0, 1}, {3, 2}}};
  return quad_faces[static_cast<std::size_t>(f)];
}

void Mesh::build_links() {
  const int nf = faces_per_elem();
  links_.assign(static_cast<std::size_t>(n_elems() * nf), FaceLink{});
  std::map<FaceKey, std::vector<std::pair<int, int>>> by_key;
  auto global_pair = [&](int e, int f) {
    const auto lv = face_vertices(f);
    const auto& el = elems_[static_cast<std::size_t>(e)];
    const int a = el[static_cast<std::size_t>(lv[0])];
    const int b = dim_ == 1 ? -1 : el[static_cast<std::size_t>(lv[1])];
    return std::array<int, 2>{a, b};
  };
  auto key_of = [&](std::array<int, 2> g) { return dim_ == 1 ? FaceKey{g[0], -1} : make_key(g[0], g[1]); };

  for (int e = 0; e < n_elems(); ++e)
    for (int f = 0; f < nf; ++f) by_key[key_of(global_pair(e, f))].emplace_back(e, f);

  std::map<FaceKey, const BoundaryFace*> bmap;
  for (const auto& bf : bfaces_) {
    const FaceKey k = dim_ == 1 ? FaceKey{bf.nodes[0], -1} : make_key(bf.nodes[0], bf.nodes[1]);
    bmap[k] = &bf;
  }

  std::map<int, std::vector<std::pair<int, int>>> periodic;
  for (const auto& [key, users] : by_key) {
    if (users.size() == 2) {
      const auto [e0, f0] = users[0];
      const auto [e1, f1] = users[1];
      const bool rev = dim_ == 2 && global_pair(e0, f0)[0] != global_pair(e1, f1)[0];
      links_[static_cast<std::size_t>(e0 * nf + f0)] = FaceLink{BoundaryKind::Interior, e1, f1, rev};
      links_[static_cast<std::size_t>(e1 * nf + f1)] = FaceLink{BoundaryKind::Interior, e0, f0, rev};
      continue;
    }
    if (users.size() != 1) throw MeshError("face shared by more than two elements");
    auto it = bmap.find(key);
    if (it == bmap.end())
      throw MeshError("boundary face of element " + std::to_string(users[0].first) + " has no boundary tag");
    const auto [e, f] = users[0];
    if (it->second->kind == BoundaryKind::Periodic) {
      periodic[it->second->pair_id].emplace_back(e, f);
    } else {
      links_[static_cast<std::size_t>(e * nf + f)] = FaceLink{BoundaryKind::Dirichlet, -1, -1, false};
    }
  }
  for (const auto& [id, faces] : periodic) {
    if (faces.size() != 2)
      throw MeshError("periodic pair " + std::to_string(id) + " has " + std::to_string(faces.size()) + " faces");
    const auto [e0, f0] = faces[0];
    const auto [e1, f1] = faces[1];
    bool rev = false;
    if (dim_ == 2) {
      const auto g0 = global_pair(e0, f0);
      const auto g1 = global_pair(e1, f1);
      const auto& a0 = nodes_[static_cast<std::size_t>(g0[0])];
      const auto& a1 = nodes_[static_cast<std::size_t>(g0[1])];
      const auto& b0 = nodes_[static_cast<std::size_t>(g1[0])];
      const auto& b1 = nodes_[static_cast<std::size_t>(g1[1])];
      rev = (a1[0] - a0[0]) * (b1[0] - b0[0]) + (a1[1] - a0[1]) * (b1[1] - b0[1]) < 0.0;
    }
    links_[static_cast<std::size_t>(e0 * nf + f0)] = FaceLink{BoundaryKind::Periodic, e1, f1, rev};
    links_[static_cast<std::size_t>(e1 * nf + f1)] = FaceLink{BoundaryKind::Periodic, e0, f0, rev};
  }
}

Mesh make_line_mesh(int n, double x0, double x1, bool periodic) {
  if (n < 1) throw MeshError("line mesh needs at least one cell");
  std::vector<Point> nodes;
  for (int i = 0; i <= n; ++i) nodes.push_back({x0 + (x1 - x0) * i / n, 0.0});
  std::vector<std::array<int, 4>> elems;
  for (int i = 0; i < n; ++i) elems.push_back({i, i + 1, -1, -1});
  std::vector<BoundaryFace> bf;
  if (periodic) {
    bf.push_back({{0, -1}, BoundaryKind::Periodic, 0});
    bf.push_back({{n, -1}, BoundaryKind::Periodic, 0});
  } else {
    bf.push_back({{0, -1}, BoundaryKind::Dirichlet, -1});
    bf.push_back({{n, -1}, BoundaryKind::Dirichlet, -1});
  }
  return Mesh(1, std::move(nodes), std::move(elems), std::move(bf));
}

Mesh make_rect_mesh(int nx, int ny, Point lo, Point hi, bool periodic) {
  if (nx < 1 || ny < 1) throw MeshError("rect mesh needs at least one cell per direction");
  std::vector<Point> nodes;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.push_back({lo[0] + (hi[0] - lo[0]) * i / nx, lo[1] + (hi[1] - lo[1]) * j / ny});
  std::vector<std::array<int, 4>> elems;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) elems.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  std::vector<BoundaryFace> bf;
  const auto kind = periodic ? BoundaryKind::Periodic : BoundaryKind::Dirichlet;
  for (int j = 0; j < ny; ++j) {
    bf.push_back({{id(0, j), id(0, j + 1)}, kind, periodic ? j : -1});
    bf.push_back({{id(nx, j), id(nx, j + 1)}, kind, periodic ? j : -1});
  }
  for (int i = 0; i < nx; ++i) {
    bf.push_back({{id(i, 0), id(i + 1, 0)}, kind, periodic ? ny + i : -1});
    bf.push_back({{id(i, ny), id(i + 1, ny)}, kind, periodic ? ny + i : -1});
  }
  return Mesh(2, std::move(nodes), std::move(elems), std::move(bf));
}

Mesh make_disk_mesh(int n_refine) {
  if (n_refine < 0) throw MeshError("disk refinement level must be >= 0");
  const int m = 2 << n_refine;  // cells per block edge
  constexpr double radius = 0.5;
  constexpr double s = 0.2;  // half-width of the central square

  std::vector<Point> nodes;
  std::map<std::pair<long long, long long>, int> index;
  auto node_id = [&](Point p) {
    const auto key = std::make_pair(std::llround(p[0] * 1e10), std::llround(p[1] * 1e10));
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(p);
    index.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 4>> elems;
  auto add_quad = [&](std::array<Point, 4> c) {
    std::array<int, 4> q{node_id(c[0]), node_id(c[1]), node_id(c[2]), node_id(c[3])};
    if (signed_area(nodes, q) < 0.0) std::swap(q[1], q[3]);
    elems.push_back(q);
  };

  // Central block.
  auto central = [&](int i, int j) { return Point{-s + 2.0 * s * i / m, -s + 2.0 * s * j / m}; };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) add_quad({central(i, j), central(i + 1, j), central(i + 1, j + 1), central(i, j + 1)});

  // East block, blending the square side x = s into the arc |theta| <= pi/4;
  // the other three are exact quarter-turn rotations of it.
  auto east = [&](int iu, int iv) {
    const double u = static_cast<double>(iu) / m;
    const double v = static_cast<double>(iv) / m;
    const double theta = -std::numbers::pi / 4 + u * std::numbers::pi / 2;
    const Point ps{s, -s + 2.0 * s * u};
    const Point pc{radius * std::cos(theta), radius * std::sin(theta)};
    if (iv == m) return pc;
    if (iv == 0) return Point{central(m, iu)[0], central(m, iu)[1]};
    return Point{(1 - v) * ps[0] + v * pc[0], (1 - v) * ps[1] + v * pc[1]};
  };
  auto rotate = [](Point p, int quarter) {
    for (int r = 0; r < quarter; ++r) p = {-p[1], p[0]};
    return p;
  };
  for (int quarter = 0; quarter < 4; ++quarter)
    for (int iv = 0; iv < m; ++iv)
      for (int iu = 0; iu < m; ++iu)
        add_quad({rotate(east(iu, iv), quarter), rotate(east(iu, iv + 1), quarter),
                  rotate(east(iu + 1, iv + 1), quarter), rotate(east(iu + 1, iv), quarter)});

  auto bf = unmatched_faces(2, elems);
  return Mesh(2, std::move(nodes), std::move(elems), std::move(bf));
}

Mesh parse_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++lineno;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return std::istringstream(line);
    }
    throw MeshError("line " + std::to_string(lineno + 1) + ": unexpected end of file");
  };
  auto fail = [&](const std::string& what) { return MeshError("line " + std::to_string(lineno) + ": " + what); };
  auto expect_end = [&](std::istringstream& ls) {
    std::string extra;
    if (ls >> extra) throw fail("trailing token '" + extra + "'");
  };

  int dim = 0, nn = 0, ne = 0, nb = 0;
  {
    auto ls = next_line();
    if (!(ls >> dim >> nn >> ne >> nb)) throw fail("expected header 'dim n_nodes n_elems n_bfaces'");
    expect_end(ls);
    if (dim != 1 && dim != 2) throw fail("dimension must be 1 or 2");
    if (nn < 1 || ne < 1 || nb < 0) throw fail("invalid counts in header");
  }
  std::vector<Point> nodes(static_cast<std::size_t>(nn), Point{0.0, 0.0});
  for (auto& p : nodes) {
    auto ls = next_line();
    if (!(ls >> p[0])) throw fail("expected node coordinate");
    if (dim == 2 && !(ls >> p[1])) throw fail("expected y coordinate");
    expect_end(ls);
  }
  std::vector<std::array<int, 4>> elems(static_cast<std::size_t>(ne), {-1, -1, -1, -1});
  const int npe = dim == 1 ? 2 : 4;
  for (auto& e : elems) {
    auto ls = next_line();
    for (int v = 0; v < npe; ++v) {
      if (!(ls >> e[static_cast<std::size_t>(v)])) throw fail("expected " + std::to_string(npe) + " node indices");
      if (e[static_cast<std::size_t>(v)] < 0 || e[static_cast<std::size_t>(v)] >= nn) throw fail("node index out of range");
    }
    expect_end(ls);
  }
  std::vector<BoundaryFace> bfaces(static_cast<std::size_t>(nb));
  for (auto& bf : bfaces) {
    auto ls = next_line();
    const int nv = dim == 1 ? 1 : 2;
    for (int v = 0; v < nv; ++v) {
      if (!(ls >> bf.nodes[static_cast<std::size_t>(v)])) throw fail("expected boundary-face node index");
      if (bf.nodes[static_cast<std::size_t>(v)] < 0 || bf.nodes[static_cast<std::size_t>(v)] >= nn)
        throw fail("boundary node index out of range");
    }
    std::string tag;
    if (!(ls >> tag)) throw fail("expected boundary tag");
    expect_end(ls);
    if (tag == "dirichlet") {
      bf.kind = BoundaryKind::Dirichlet;
    } else if (tag.rfind("periodic:", 0) == 0) {
      bf.kind = BoundaryKind::Periodic;
      try {
        std::size_t used = 0;
        bf.pair_id = std::stoi(tag.substr(9), &used);
        if (used != tag.size() - 9) throw std::invalid_argument("junk");
      } catch (const std::exception&) {
        throw fail("bad periodic pair id in '" + tag + "'");
      }
    } else {
      throw fail("unknown boundary tag '" + tag + "'");
    }
  }
  try {
    return Mesh(dim, std::move(nodes), std::move(elems), std::move(bfaces));
  } catch (const MeshError& e) {
    throw MeshError(std::string("invalid mesh topology: ") + e.what());
  }
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh(ss.str());
}

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << mesh.dim() << ' ' << mesh.n_nodes() << ' ' << mesh.n_elems() << ' ' << mesh.boundary_faces().size() << '\n';
  for (const auto& p : mesh.nodes()) {
    out << p[0];
    if (mesh.dim() == 2) out << ' ' << p[1];
    out << '\n';
  }
  for (const auto& e : mesh.elems()) {
    for (int v = 0; v < mesh.nodes_per_elem(); ++v) out << (v ? " " : "") << e[static_cast<std::size_t>(v)];
    out << '\n';
  }
  for (const auto& bf : mesh.boundary_faces()) {
    out << bf.nodes[0];
    if (mesh.dim() == 2) out << ' ' << bf.nodes[1];
    if (bf.kind == BoundaryKind::Periodic)
      out << " periodic:" << bf.pair_id << '\n';
    else
      out << " dirichlet\n";
  }
  return out.str();
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
}

}  // namespace stfr
