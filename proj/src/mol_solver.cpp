#include "stfr/mol_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "stfr/geometry.hpp"
#include "stfr/layout.hpp"

namespace stfr {

namespace {

State load(const double* src, int nv) {
  State q{};
  for (int v = 0; v < nv; ++v) q[static_cast<std::size_t>(v)] = src[v];
  return q;
}

/// Spatial contravariant rows |J| grad(xi_d) at one point, plus |J| and position.
struct PointMetric {
  std::array<std::array<double, 2>, 2> row{};
  double jac = 0.0;
  Point x{0.0, 0.0};
};

PointMetric point_metric(int dim, std::span<const Point> corners, double xi, double eta) {
  const auto sm = eval_spatial_map(dim, corners, xi, eta);
  PointMetric m;
  m.x = sm.x;
  if (dim == 1) {
    m.row[0] = {1.0, 0.0};
    m.jac = sm.x_xi;
  } else {
    m.row[0] = {sm.y_eta, -sm.x_eta};
    m.row[1] = {-sm.y_xi, sm.x_xi};
    m.jac = sm.det();
  }
  if (m.jac <= 0.0) throw GeometryError("non-positive spatial Jacobian in the moving mesh");
  return m;
}

Point interp_velocity(int dim, std::span<const Point> cv, double xi, double eta) {
  const auto w = corner_weights(dim, xi, eta);
  Point v{0.0, 0.0};
  for (int a = 0; a < (dim == 1 ? 2 : 4); ++a) {
    v[0] += w[static_cast<std::size_t>(a)] * cv[static_cast<std::size_t>(a)][0];
    v[1] += w[static_cast<std::size_t>(a)] * cv[static_cast<std::size_t>(a)][1];
  }
  return v;
}

/// Reference coordinates of point a on spatial face f.
std::array<double, 2> face_ref(int dim, int f, double s) {
  (void)dim;
  const double side = f % 2 == 0 ? -1.0 : 1.0;
  if (f / 2 == 0) return {side, s};
  return {s, side};
}

MolField rk3_generic(const MolField& u, double dt, const MolRhs& rhs,
                     const std::function<std::vector<Point>(double)>& coords_at) {
  const std::size_t n = u.values.size();
  MolField s1 = u;
  const auto r0 = rhs(u);
  for (std::size_t i = 0; i < n; ++i) s1.values[i] = u.values[i] + dt * r0[i];
  s1.t = u.t + dt;
  if (coords_at) s1.coords = coords_at(1.0);
  MolField s2 = s1;
  const auto r1 = rhs(s1);
  for (std::size_t i = 0; i < n; ++i) s2.values[i] = 0.75 * u.values[i] + 0.25 * (s1.values[i] + dt * r1[i]);
  s2.t = u.t + 0.5 * dt;
  if (coords_at) s2.coords = coords_at(0.5);
  MolField out = s2;
  const auto r2 = rhs(s2);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = u.values[i] / 3.0 + 2.0 / 3.0 * (s2.values[i] + dt * r2[i]);
  out.t = u.t + dt;
  return out;
}

}  // namespace

std::vector<Point> grid_velocity_step(std::span<const Point> coords_n, std::span<const Point> coords_np1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid_velocity_step: dt must be positive");
  if (coords_n.size() != coords_np1.size()) throw std::invalid_argument("grid_velocity_step: size mismatch");
  std::vector<Point> v(coords_n.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = {(coords_np1[i][0] - coords_n[i][0]) / dt, (coords_np1[i][1] - coords_n[i][1]) / dt};
  return v;
}

std::vector<double> mol_residual(const MolField& field, std::span<const Point> vg, const EquationSet& eq,
                                 const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space) {
  const int dim = mesh.dim();
  const StLayout L(dim, space.degree(), 0);
  const int ns = L.ns;
  const int sp = L.spatial_points();
  const int nf = L.spatial_faces();
  const int fq = L.face_points(0);
  const int nv = field.n_vars;
  const int ne = mesh.n_elems();
  const auto& xs = space.nodes();
  if (field.n_elems != ne || field.n_spatial != sp || vg.size() != mesh.nodes().size())
    throw std::invalid_argument("mol_residual: field, velocity and mesh disagree in shape");

  // Face traces, face rows (spatial components + grid part) and positions.
  const auto fidx = [&](int e, int f, int q) {
    return (static_cast<std::size_t>(e) * static_cast<std::size_t>(nf) + static_cast<std::size_t>(f)) *
               static_cast<std::size_t>(fq) +
           static_cast<std::size_t>(q);
  };
  const std::size_t n_face = static_cast<std::size_t>(ne * nf * fq);
  std::vector<double> trace(n_face * static_cast<std::size_t>(nv), 0.0);
  std::vector<std::array<double, 3>> frow(n_face);
  std::vector<Point> fx(n_face);
  for (int e = 0; e < ne; ++e) {
    const auto corners = element_corners(mesh, field.coords, e);
    std::array<Point, 4> cv{};
    const auto& el = mesh.elems()[static_cast<std::size_t>(e)];
    for (int a = 0; a < mesh.nodes_per_elem(); ++a)
      cv[static_cast<std::size_t>(a)] = vg[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
    for (int f = 0; f < nf; ++f) {
      const int d = f / 2;
      const auto& ext = f % 2 == 0 ? space.extrap_left() : space.extrap_right();
      const int st = L.stride[static_cast<std::size_t>(d)];
      const auto& bases = L.line_base[static_cast<std::size_t>(d)];
      for (int q = 0; q < fq; ++q) {
        const auto k = fidx(e, f, q);
        double* out = trace.data() + k * static_cast<std::size_t>(nv);
        const int p0 = bases[static_cast<std::size_t>(q)];
        for (int j = 0; j < ns; ++j)
          for (int v = 0; v < nv; ++v)
            out[v] += ext[static_cast<std::size_t>(j)] * field.at(e, p0 + j * st, v);
        const auto r = face_ref(dim, f, dim == 2 ? xs[static_cast<std::size_t>(q)] : 0.0);
        const auto pm = point_metric(dim, corners, r[0], r[1]);
        const auto vel = interp_velocity(dim, cv, r[0], r[1]);
        const auto& row = pm.row[static_cast<std::size_t>(d)];
        frow[k] = {row[0], row[1], -(row[0] * vel[0] + row[1] * vel[1])};
        fx[k] = pm.x;
      }
    }
  }

  std::vector<double> out(field.values.size(), 0.0);
  std::vector<double> contra(static_cast<std::size_t>(2 * sp * nv));
  std::vector<double> div(static_cast<std::size_t>(sp * nv));
  std::vector<double> line(static_cast<std::size_t>(ns));
  std::vector<PointMetric> pms(static_cast<std::size_t>(sp));
  std::vector<Point> pvel(static_cast<std::size_t>(sp));
  std::array<double, 3> n{};

  for (int e = 0; e < ne; ++e) {
    const auto corners = element_corners(mesh, field.coords, e);
    std::array<Point, 4> cv{};
    const auto& el = mesh.elems()[static_cast<std::size_t>(e)];
    for (int a = 0; a < mesh.nodes_per_elem(); ++a)
      cv[static_cast<std::size_t>(a)] = vg[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
    std::fill(div.begin(), div.end(), 0.0);

    for (int p = 0; p < sp; ++p) {
      const double xi = xs[static_cast<std::size_t>(p % ns)];
      const double eta = dim == 2 ? xs[static_cast<std::size_t>(p / ns)] : 0.0;
      const auto up = static_cast<std::size_t>(p);
      pms[up] = point_metric(dim, corners, xi, eta);
      pvel[up] = interp_velocity(dim, cv, xi, eta);
      const State q = load(field.values.data() + field.index(e, p, 0), nv);
      const auto fg = flux(eq, q);
      for (int d = 0; d < dim; ++d) {
        const auto& row = pms[up].row[static_cast<std::size_t>(d)];
        for (int v = 0; v < nv; ++v) {
          const auto uv = static_cast<std::size_t>(v);
          contra[static_cast<std::size_t>((d * sp + p) * nv + v)] = row[0] * fg[0][uv] + (dim == 2 ? row[1] * fg[1][uv] : 0.0);
        }
      }
    }

    const auto face_terms = [&](int f, int q, State& common, State& ale) {
      const auto k = fidx(e, f, q);
      const auto& N = frow[k];
      const double s = f % 2 == 0 ? -1.0 : 1.0;
      const double nrm = std::sqrt(N[0] * N[0] + N[1] * N[1] + N[2] * N[2]);
      if (dim == 1) {
        n = {s * N[0] / nrm, s * N[2] / nrm, 0.0};
      } else {
        n = {s * N[0] / nrm, s * N[1] / nrm, s * N[2] / nrm};
      }
      const State qin = load(trace.data() + k * static_cast<std::size_t>(nv), nv);
      const FaceLink& link = mesh.link(e, f);
      State qout;
      if (link.kind == BoundaryKind::Dirichlet) {
        if (!bc.exterior) throw std::invalid_argument("mol_residual: Dirichlet face without an exterior state");
        qout = bc.exterior(fx[k][0], fx[k][1], field.t);
      } else {
        const auto kn = fidx(link.elem, link.face, L.neighbor_face_point(q, link.reversed));
        qout = load(trace.data() + kn * static_cast<std::size_t>(nv), nv);
      }
      common = common_flux(eq, qin, qout, std::span<const double>(n.data(), static_cast<std::size_t>(dim + 1)));
      for (int v = 0; v < nv; ++v) {
        common[static_cast<std::size_t>(v)] *= s * nrm;
        ale[static_cast<std::size_t>(v)] = N[2] * qin[static_cast<std::size_t>(v)];
      }
    };

    for (int d = 0; d < dim; ++d) {
      const int st = L.stride[static_cast<std::size_t>(d)];
      const auto& bases = L.line_base[static_cast<std::size_t>(d)];
      for (std::size_t qi = 0; qi < bases.size(); ++qi) {
        const int q = static_cast<int>(qi);
        const int p0 = bases[qi];
        State cl, cr, al, ar;
        face_terms(2 * d, q, cl, al);
        face_terms(2 * d + 1, q, cr, ar);
        for (int v = 0; v < nv; ++v) {
          const auto uv = static_cast<std::size_t>(v);
          fr_line_derivative(space, contra.data() + static_cast<std::size_t>((d * sp + p0) * nv + v), st * nv,
                             cl[uv] - al[uv], cr[uv] - ar[uv], line.data(), 1);
          for (int j = 0; j < ns; ++j) div[static_cast<std::size_t>((p0 + j * st) * nv + v)] += line[static_cast<std::size_t>(j)];
        }
      }
    }

    for (int p = 0; p < sp; ++p) {
      const auto up = static_cast<std::size_t>(p);
      const int i = p % ns;
      const int j = p / ns;
      const State src = source(eq, load(field.values.data() + field.index(e, p, 0), nv));
      for (int v = 0; v < nv; ++v) {
        // reference gradient of the local polynomial
        double u_xi = 0.0, u_eta = 0.0;
        for (int m = 0; m < ns; ++m) {
          u_xi += space.diff(i, m) * field.at(e, m + ns * j, v);
          if (dim == 2) u_eta += space.diff(j, m) * field.at(e, i + ns * m, v);
        }
        const auto& r0 = pms[up].row[0];
        const auto& r1 = pms[up].row[1];
        const double gx = r0[0] * u_xi + r1[0] * u_eta;
        const double gy = r0[1] * u_xi + r1[1] * u_eta;
        const double vgrad = pvel[up][0] * gx + (dim == 2 ? pvel[up][1] * gy : 0.0);
        out[field.index(e, p, v)] =
            (-div[static_cast<std::size_t>(p * nv + v)] + vgrad) / pms[up].jac + src[static_cast<std::size_t>(v)];
      }
    }
  }
  return out;
}

MolField rk3_step(const MolField& field, double dt, const MolRhs& rhs) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk3_step: dt must be positive");
  return rk3_generic(field, dt, rhs, {});
}

MolField rk3_physical_step(const MolField& field, std::span<const Point> coords_np1, double dt, const EquationSet& eq,
                           const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk3_physical_step: dt must be positive");
  const auto vg = grid_velocity_step(field.coords, coords_np1, dt);
  const auto coords_at = [&](double c) {
    if (c == 1.0) return std::vector<Point>(coords_np1.begin(), coords_np1.end());
    std::vector<Point> x(field.coords.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = {field.coords[i][0] + c * dt * vg[i][0], field.coords[i][1] + c * dt * vg[i][1]};
    return x;
  };
  const MolRhs rhs = [&](const MolField& s) { return mol_residual(s, vg, eq, bc, mesh, space); };
  MolField out = rk3_generic(field, dt, rhs, coords_at);
  out.coords.assign(coords_np1.begin(), coords_np1.end());
  return out;
}

MolField mol_initial(const Mesh& mesh, const MolProblem& prob, const BasisSet& space) {
  MolField f;
  f.coords = initial_coords(prob.motion, mesh);
  const auto s = sample_spatial(mesh, f.coords, space, n_vars(prob.eq), prob.initial, 0.0);
  f.n_vars = s.n_vars;
  f.n_elems = s.n_elems;
  f.n_spatial = s.n_spatial;
  f.values = s.values;
  f.t = 0.0;
  return f;
}

MolField run_mol(const Mesh& mesh, const MolProblem& prob) {
  if (spatial_dim(prob.eq) != mesh.dim()) throw std::invalid_argument("equation and mesh dimensions differ");
  if (!prob.initial) throw std::invalid_argument("run_mol: missing initial condition");
  const BasisSet space(prob.ks);
  const int steps = step_count(prob.t_final, prob.dt);
  MolField f = mol_initial(mesh, prob, space);
  for (int n = 0; n < steps; ++n) {
    const double t0 = n * prob.dt;
    const auto next = advance_positions(prob.motion, mesh, f.coords, t0, prob.dt);
    f = rk3_physical_step(f, next, prob.dt, prob.eq, prob.bc, mesh, space);
    f.t = (n + 1) * prob.dt;
  }
  return f;
}

}  // namespace stfr
