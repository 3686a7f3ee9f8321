#pragma once

#include <array>
#include <vector>

namespace stfr {

/// Tensor-product point layout of one space-time element.
///
/// Direction d < dim is spatial (ns points), d == dim is temporal (nt points).
/// Point index p = i + ns*j + ns^dim*m, with m the temporal index.
struct StLayout {
  int dim = 1;
  int ns = 1;
  int nt = 1;
  int n_points = 1;
  std::array<int, 3> size{1, 1, 1};
  std::array<int, 3> stride{0, 0, 0};
  /// First point of each line along direction d; lines ordered by the
  /// remaining indices, lowest direction fastest. Line q is face point q.
  std::array<std::vector<int>, 3> line_base;

  StLayout() = default;
  StLayout(int dim_, int ks, int kt) : dim(dim_), ns(ks + 1), nt(kt + 1) {
    int s = 1;
    for (int d = 0; d <= dim; ++d) {
      size[static_cast<std::size_t>(d)] = d < dim ? ns : nt;
      stride[static_cast<std::size_t>(d)] = s;
      s *= size[static_cast<std::size_t>(d)];
    }
    n_points = s;
    for (int d = 0; d <= dim; ++d) {
      auto& lb = line_base[static_cast<std::size_t>(d)];
      lb.clear();
      for (int p = 0; p < n_points; ++p)
        if ((p / stride[static_cast<std::size_t>(d)]) % size[static_cast<std::size_t>(d)] == 0) lb.push_back(p);
    }
  }

  int n_dirs() const { return dim + 1; }
  int spatial_points() const { return dim == 1 ? ns : ns * ns; }
  int face_points(int d) const { return n_points / size[static_cast<std::size_t>(d)]; }
  int spatial_faces() const { return 2 * dim; }

  /// Neighbor face-point index for a spatial face shared with `reversed` orientation.
  int neighbor_face_point(int q, bool reversed) const {
    if (dim == 1 || !reversed) return q;
    const int a = q % ns;
    return (ns - 1 - a) + ns * (q / ns);
  }
};

}  // namespace stfr
