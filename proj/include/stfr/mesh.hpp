#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace stfr {

using Point = std::array<double, 2>;  // y unused in 1D

enum class BoundaryKind { Interior, Periodic, Dirichlet };

/// Connection of one local element face to whatever lies across it.
struct FaceLink {
  BoundaryKind kind = BoundaryKind::Interior;
  int elem = -1;          // neighbor element (Interior / Periodic)
  int face = -1;          // neighbor's local face id
  bool reversed = false;  // along-face parameter runs opposite on the neighbor
};

/// A file-level boundary face record: one node in 1D, two in 2D.
struct BoundaryFace {
  std::array<int, 2> nodes{-1, -1};
  BoundaryKind kind = BoundaryKind::Dirichlet;
  int pair_id = -1;  // periodic partner tag
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unstructured segment (1D) or counter-clockwise quad (2D) mesh.
///
/// Local faces are numbered 2*d + s: direction d (0 = xi, 1 = eta) and side
/// s (0 = -1, 1 = +1). In 2D the along-face parameter of faces 0/1 is eta and
/// of faces 2/3 is xi, each running from -1 to +1.
class Mesh {
 public:
  Mesh(int dim, std::vector<Point> nodes, std::vector<std::array<int, 4>> elems,
       std::vector<BoundaryFace> bfaces);

  int dim() const { return dim_; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  int n_elems() const { return static_cast<int>(elems_.size()); }
  int nodes_per_elem() const { return dim_ == 1 ? 2 : 4; }
  int faces_per_elem() const { return 2 * dim_; }

  /// Reference (t = 0) coordinates.
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 4>>& elems() const { return elems_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return bfaces_; }
  const FaceLink& link(int e, int f) const { return links_[static_cast<std::size_t>(e * faces_per_elem() + f)]; }

  /// Element-local vertex ids of face f in along-face parameter order.
  std::array<int, 2> face_vertices(int f) const;

 private:
  void build_links();

  int dim_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 4>> elems_;
  std::vector<BoundaryFace> bfaces_;
  std::vector<FaceLink> links_;
};

/// Uniform mesh of [x0, x1] with n cells.
Mesh make_line_mesh(int n, double x0, double x1, bool periodic);

/// Uniform nx-by-ny quad mesh of [x0,x1]x[y0,y1].
Mesh make_rect_mesh(int nx, int ny, Point lo, Point hi, bool periodic);

/// Five-block butterfly quad mesh of the radius-0.5 disk at the origin;
/// level r has 20 * 4^r elements, every boundary face analytic-Dirichlet.
Mesh make_disk_mesh(int n_refine);

/// Plain-text mesh format:
///   dim n_nodes n_elems n_bfaces
///   x [y]                      (n_nodes lines)
///   a b [c d]                  (n_elems lines, 0-based, CCW)
///   node_a [node_b] tag        (tag: periodic:<id> | dirichlet)
Mesh read_mesh(const std::filesystem::path& path);
Mesh parse_mesh(const std::string& text);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const Mesh& mesh);

}  // namespace stfr
