#include "stfr/geometry.hpp"

#include <cmath>
#include <sstream>

namespace stfr {

std::array<double, 4> corner_weights(int dim, double xi, double eta) {
  if (dim == 1) return {0.5 * (1.0 - xi), 0.5 * (1.0 + xi), 0.0, 0.0};
  return {0.25 * (1.0 - xi) * (1.0 - eta), 0.25 * (1.0 + xi) * (1.0 - eta), 0.25 * (1.0 + xi) * (1.0 + eta),
          0.25 * (1.0 - xi) * (1.0 + eta)};
}

SpatialMap eval_spatial_map(int dim, std::span<const Point> c, double xi, double eta) {
  SpatialMap m;
  if (dim == 1) {
    m.x = {0.5 * (1.0 - xi) * c[0][0] + 0.5 * (1.0 + xi) * c[1][0], 0.0};
    m.x_xi = 0.5 * (c[1][0] - c[0][0]);
    m.y_eta = 1.0;
    return m;
  }
  const auto w = corner_weights(2, xi, eta);
  const std::array<double, 4> dxi{-0.25 * (1.0 - eta), 0.25 * (1.0 - eta), 0.25 * (1.0 + eta), -0.25 * (1.0 + eta)};
  const std::array<double, 4> deta{-0.25 * (1.0 - xi), -0.25 * (1.0 + xi), 0.25 * (1.0 + xi), 0.25 * (1.0 - xi)};
  for (std::size_t a = 0; a < 4; ++a) {
    m.x[0] += w[a] * c[a][0];
    m.x[1] += w[a] * c[a][1];
    m.x_xi += dxi[a] * c[a][0];
    m.x_eta += deta[a] * c[a][0];
    m.y_xi += dxi[a] * c[a][1];
    m.y_eta += deta[a] * c[a][1];
  }
  return m;
}

SpaceTimeMap eval_spacetime_map(int dim, std::span<const Point> cn, std::span<const Point> cn1, double t0, double dt,
                                double xi, double eta, double tau) {
  const int nc = dim == 1 ? 2 : 4;
  std::array<Point, 4> cur{};
  std::array<Point, 4> vel{};  // d/dtau of corner positions
  for (int a = 0; a < nc; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    for (int c = 0; c < 2; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      cur[ua][uc] = 0.5 * (1.0 - tau) * cn[ua][uc] + 0.5 * (1.0 + tau) * cn1[ua][uc];
      vel[ua][uc] = 0.5 * (cn1[ua][uc] - cn[ua][uc]);
    }
  }
  const auto sm = eval_spatial_map(dim, std::span<const Point>(cur.data(), static_cast<std::size_t>(nc)), xi, eta);
  const auto w = corner_weights(dim, xi, eta);
  double x_tau = 0.0, y_tau = 0.0;
  for (int a = 0; a < nc; ++a) {
    x_tau += w[static_cast<std::size_t>(a)] * vel[static_cast<std::size_t>(a)][0];
    y_tau += w[static_cast<std::size_t>(a)] * vel[static_cast<std::size_t>(a)][1];
  }
  const double t_tau = 0.5 * dt;
  SpaceTimeMap m;
  if (dim == 1) {
    m.xt = {sm.x[0], t0 + 0.5 * (1.0 + tau) * dt, 0.0};
    m.spatial_jac = sm.x_xi;
    m.jac = t_tau * sm.x_xi;
    m.metric[0] = {t_tau, -x_tau, 0.0};
    m.metric[1] = {0.0, sm.x_xi, 0.0};
    return m;
  }
  m.xt = {sm.x[0], sm.x[1], t0 + 0.5 * (1.0 + tau) * dt};
  m.spatial_jac = sm.det();
  m.jac = t_tau * m.spatial_jac;
  m.metric[0] = {sm.y_eta * t_tau, -sm.x_eta * t_tau, sm.x_eta * y_tau - sm.y_eta * x_tau};
  m.metric[1] = {-sm.y_xi * t_tau, sm.x_xi * t_tau, sm.y_xi * x_tau - sm.x_xi * y_tau};
  m.metric[2] = {0.0, 0.0, m.spatial_jac};
  return m;
}

std::array<Point, 4> element_corners(const Mesh& mesh, std::span<const Point> coords, int e) {
  std::array<Point, 4> c{};
  const auto& el = mesh.elems()[static_cast<std::size_t>(e)];
  for (int a = 0; a < mesh.nodes_per_elem(); ++a)
    c[static_cast<std::size_t>(a)] = coords[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
  return c;
}

SlabGeometry::SlabGeometry(const Mesh& mesh, std::vector<Point> coords_n, std::vector<Point> coords_np1, double t0,
                           double dt, const BasisSet& space, const BasisSet& time)
    : layout_(mesh.dim(), space.degree(), time.degree()),
      n_elems_(mesh.n_elems()),
      t0_(t0),
      dt_(dt),
      coords_n_(std::move(coords_n)),
      coords_np1_(std::move(coords_np1)) {
  if (!(dt > 0.0)) throw std::invalid_argument("slab_geometry: dt must be positive");
  if (coords_n_.size() != mesh.nodes().size() || coords_np1_.size() != mesh.nodes().size())
    throw std::invalid_argument("slab_geometry: coordinate sets do not match the mesh");
  const int dim = layout_.dim;
  const int nd = dim + 1;
  const int np = layout_.n_points;
  const int ns = layout_.ns;
  const int nf = layout_.spatial_faces();
  const int fq = layout_.face_points(0);
  const int sp = layout_.spatial_points();
  const auto& xs = space.nodes();
  const auto& ts = time.nodes();
  const auto ne = static_cast<std::size_t>(n_elems_);

  corners_n_.resize(ne);
  corners_np1_.resize(ne);
  jac_.resize(ne * static_cast<std::size_t>(np));
  metric_.resize(ne * static_cast<std::size_t>(np * nd * nd));
  xt_.resize(ne * static_cast<std::size_t>(np * nd));
  face_metric_.resize(ne * static_cast<std::size_t>(nf * fq * nd));
  face_xt_.resize(face_metric_.size());
  time_jac_.resize(ne * 2 * static_cast<std::size_t>(sp));

  auto degenerate = [](int e, const std::string& where, double j) {
    std::ostringstream os;
    os << "degenerate space-time geometry: element " << e << ", " << where << ", |J| = " << j;
    return GeometryError(os.str());
  };

  for (int e = 0; e < n_elems_; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    corners_n_[ue] = element_corners(mesh, coords_n_, e);
    corners_np1_[ue] = element_corners(mesh, coords_np1_, e);
    const std::span<const Point> cn(corners_n_[ue].data(), 4);
    const std::span<const Point> cn1(corners_np1_[ue].data(), 4);

    for (int p = 0; p < np; ++p) {
      const int i = p % ns;
      const int j = dim == 2 ? (p / ns) % ns : 0;
      const int m = p / layout_.stride[static_cast<std::size_t>(dim)];
      const double eta = dim == 2 ? xs[static_cast<std::size_t>(j)] : 0.0;
      const auto mp = eval_spacetime_map(dim, cn, cn1, t0, dt, xs[static_cast<std::size_t>(i)], eta,
                                         ts[static_cast<std::size_t>(m)]);
      if (mp.jac <= kDegenerateJacobian) throw degenerate(e, "solution point " + std::to_string(p), mp.jac);
      const auto base = ue * static_cast<std::size_t>(np) + static_cast<std::size_t>(p);
      jac_[base] = mp.jac;
      for (int d = 0; d < nd; ++d)
        for (int c = 0; c < nd; ++c)
          metric_[base * static_cast<std::size_t>(nd * nd) + static_cast<std::size_t>(d * nd + c)] =
              mp.metric[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
      for (int c = 0; c < nd; ++c) xt_[base * static_cast<std::size_t>(nd) + static_cast<std::size_t>(c)] = mp.xt[static_cast<std::size_t>(c)];
    }

    for (int f = 0; f < nf; ++f) {
      const int d = f / 2;
      const double side = (f % 2 == 0) ? -1.0 : 1.0;
      for (int q = 0; q < fq; ++q) {
        const int a = dim == 2 ? q % ns : 0;
        const int m = dim == 2 ? q / ns : q;
        double xi = side, eta = 0.0;
        if (dim == 2) {
          if (d == 0) {
            eta = xs[static_cast<std::size_t>(a)];
          } else {
            xi = xs[static_cast<std::size_t>(a)];
            eta = side;
          }
        }
        const auto mp = eval_spacetime_map(dim, cn, cn1, t0, dt, xi, eta, ts[static_cast<std::size_t>(m)]);
        if (mp.jac <= kDegenerateJacobian) throw degenerate(e, "face " + std::to_string(f) + " point " + std::to_string(q), mp.jac);
        const auto base = (ue * static_cast<std::size_t>(nf) + static_cast<std::size_t>(f)) * static_cast<std::size_t>(fq) +
                          static_cast<std::size_t>(q);
        for (int c = 0; c < nd; ++c) {
          face_metric_[base * static_cast<std::size_t>(nd) + static_cast<std::size_t>(c)] =
              mp.metric[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
          face_xt_[base * static_cast<std::size_t>(nd) + static_cast<std::size_t>(c)] = mp.xt[static_cast<std::size_t>(c)];
        }
      }
    }

    for (int side = 0; side < 2; ++side) {
      const double tau = side == 0 ? -1.0 : 1.0;
      for (int q = 0; q < sp; ++q) {
        const double xi = xs[static_cast<std::size_t>(q % ns)];
        const double eta = dim == 2 ? xs[static_cast<std::size_t>(q / ns)] : 0.0;
        const auto mp = eval_spacetime_map(dim, cn, cn1, t0, dt, xi, eta, tau);
        if (mp.jac <= kDegenerateJacobian) throw degenerate(e, side == 0 ? "bottom face" : "top face", mp.jac);
        time_jac_[(ue * 2 + static_cast<std::size_t>(side)) * static_cast<std::size_t>(sp) + static_cast<std::size_t>(q)] =
            mp.spatial_jac;
      }
    }
  }
}

SlabGeometry slab_geometry(const Mesh& mesh, std::vector<Point> coords_n, std::vector<Point> coords_np1, double t0,
                           double dt, const BasisSet& space, const BasisSet& time) {
  return SlabGeometry(mesh, std::move(coords_n), std::move(coords_np1), t0, dt, space, time);
}

void fr_line_derivative(const BasisSet& b, const double* values, int stride, double left, double right, double* out,
                        int out_stride) {
  const int n = b.size();
  const auto& el = b.extrap_left();
  const auto& er = b.extrap_right();
  // Operate on differences from the first value.
  const double v0 = values[0];
  double vl = 0.0, vr = 0.0;
  for (int j = 0; j < n; ++j) {
    vl += el[static_cast<std::size_t>(j)] * (values[j * stride] - v0);
    vr += er[static_cast<std::size_t>(j)] * (values[j * stride] - v0);
  }
  const double jl = (left - v0) - vl;
  const double jr = (right - v0) - vr;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += b.diff(i, j) * (values[j * stride] - v0);
    out[i * out_stride] = s + jl * b.corr_left()[static_cast<std::size_t>(i)] + jr * b.corr_right()[static_cast<std::size_t>(i)];
  }
}

namespace {

/// sum_d FR-derivative of metric component c along direction d.
std::vector<double> metric_divergence(const SlabGeometry& g, const BasisSet& space, const BasisSet& time, int c) {
  const auto& L = g.layout();
  const int nd = L.dim + 1;
  const int np = L.n_points;
  std::vector<double> out(static_cast<std::size_t>(g.n_elems() * np), 0.0);
  std::vector<double> vals(static_cast<std::size_t>(np));
  std::vector<double> deriv(static_cast<std::size_t>(np));
  for (int e = 0; e < g.n_elems(); ++e) {
    double* res = out.data() + static_cast<std::size_t>(e * np);
    for (int d = 0; d < nd; ++d) {
      for (int p = 0; p < np; ++p) vals[static_cast<std::size_t>(p)] = g.metric(e, p, d, c);
      const auto& b = d < L.dim ? space : time;
      const int st = L.stride[static_cast<std::size_t>(d)];
      const auto& bases = L.line_base[static_cast<std::size_t>(d)];
      for (std::size_t q = 0; q < bases.size(); ++q) {
        const int p0 = bases[q];
        double left, right;
        if (d < L.dim) {
          left = g.face_metric(e, 2 * d, static_cast<int>(q))[c];
          right = g.face_metric(e, 2 * d + 1, static_cast<int>(q))[c];
        } else {
          // temporal row is (0[, 0], J_s)
          left = c == L.dim ? g.time_face_jac(e, 0, static_cast<int>(q)) : 0.0;
          right = c == L.dim ? g.time_face_jac(e, 1, static_cast<int>(q)) : 0.0;
        }
        fr_line_derivative(b, vals.data() + p0, st, left, right, deriv.data() + p0, st);
      }
      for (int p = 0; p < np; ++p) res[p] += deriv[static_cast<std::size_t>(p)];
    }
  }
  return out;
}

}  // namespace

std::vector<double> gcl_residual(const SlabGeometry& geom, const BasisSet& space, const BasisSet& time) {
  return metric_divergence(geom, space, time, geom.dim());
}

double metric_identity_residual(const SlabGeometry& geom, const BasisSet& space, const BasisSet& time) {
  double worst = 0.0;
  for (int c = 0; c < geom.dim(); ++c)
    for (double v : metric_divergence(geom, space, time, c)) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace stfr
