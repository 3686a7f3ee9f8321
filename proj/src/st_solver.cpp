#include "stfr/st_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stfr {

namespace {

State load(const double* src, int nv) {
  State q{};
  for (int v = 0; v < nv; ++v) q[static_cast<std::size_t>(v)] = src[v];
  return q;
}

std::string where(int e, const std::string& what) {
  std::ostringstream os;
  os << "element " << e << ", " << what;
  return os.str();
}

}  // namespace

State StateField::state(int e, int p) const { return load(values.data() + index(e, p, 0), n_vars); }

State SlabInflow::state(int e, int q) const { return load(values.data() + index(e, q, 0), n_vars); }

StateField st_residual(const StateField& field, const SlabGeometry& geom, const SlabInflow& inflow,
                       const EquationSet& eq, const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space,
                       const BasisSet& time) {
  const StLayout& L = geom.layout();
  const int dim = L.dim;
  const int nd = dim + 1;
  const int np = L.n_points;
  const int nf = L.spatial_faces();
  const int fq = L.face_points(0);
  const int sp = L.spatial_points();
  const int nv = field.n_vars;
  const int ne = geom.n_elems();
  if (field.n_elems != ne || field.layout.n_points != np || inflow.n_elems != ne || inflow.n_spatial != sp)
    throw std::invalid_argument("st_residual: field, inflow and geometry disagree in shape");

  // Face traces of the solution on every spatial face.
  const auto face_index = [&](int e, int f, int q) {
    return ((static_cast<std::size_t>(e) * static_cast<std::size_t>(nf) + static_cast<std::size_t>(f)) *
                static_cast<std::size_t>(fq) +
            static_cast<std::size_t>(q)) *
           static_cast<std::size_t>(nv);
  };
  std::vector<double> trace(static_cast<std::size_t>(ne * nf * fq * nv), 0.0);
  for (int e = 0; e < ne; ++e) {
    for (int f = 0; f < nf; ++f) {
      const int d = f / 2;
      const auto& ext = f % 2 == 0 ? space.extrap_left() : space.extrap_right();
      const int st = L.stride[static_cast<std::size_t>(d)];
      const auto& bases = L.line_base[static_cast<std::size_t>(d)];
      for (int q = 0; q < fq; ++q) {
        double* out = trace.data() + face_index(e, f, q);
        const int p0 = bases[static_cast<std::size_t>(q)];
        for (int j = 0; j < L.ns; ++j) {
          const double w = ext[static_cast<std::size_t>(j)];
          for (int v = 0; v < nv; ++v) out[v] += w * field.at(e, p0 + j * st, v);
        }
      }
    }
  }

  StateField res(L, nv, ne);
  res.slab = field.slab;
  res.t0 = field.t0;
  res.dt = field.dt;

  std::vector<std::vector<double>> contra(static_cast<std::size_t>(nd), std::vector<double>(static_cast<std::size_t>(np * nv)));
  std::vector<double> div(static_cast<std::size_t>(np * nv));
  std::vector<double> line(static_cast<std::size_t>(std::max(L.ns, L.nt)));
  std::array<double, 3> n{};

  for (int e = 0; e < ne; ++e) {
    std::fill(div.begin(), div.end(), 0.0);
    const double* M = geom.metric_ptr(e);
    for (int p = 0; p < np; ++p) {
      const State q = field.state(e, p);
      std::array<State, 2> fg;
      try {
        fg = flux(eq, q);
      } catch (const NonPhysicalState& ex) {
        throw NonPhysicalState(where(e, "solution point " + std::to_string(p) + ": " + ex.what()));
      }
      for (int d = 0; d < nd; ++d) {
        const double* row = M + static_cast<std::size_t>((p * nd + d) * nd);
        double* out = contra[static_cast<std::size_t>(d)].data() + static_cast<std::size_t>(p * nv);
        for (int v = 0; v < nv; ++v) {
          const auto uv = static_cast<std::size_t>(v);
          double s = row[dim] * q[uv] + row[0] * fg[0][uv];
          if (dim == 2) s += row[1] * fg[1][uv];
          out[v] = s;
        }
      }
    }

    const auto spatial_common = [&](int f, int q) {
      const double* N = geom.face_metric(e, f, q);
      const double s = f % 2 == 0 ? -1.0 : 1.0;
      double nrm = 0.0;
      for (int c = 0; c < nd; ++c) nrm += N[c] * N[c];
      nrm = std::sqrt(nrm);
      for (int c = 0; c < nd; ++c) n[static_cast<std::size_t>(c)] = s * N[c] / nrm;
      const State qin = load(trace.data() + face_index(e, f, q), nv);
      const FaceLink& link = mesh.link(e, f);
      State qout;
      if (link.kind == BoundaryKind::Dirichlet) {
        if (!bc.exterior) throw std::invalid_argument("st_residual: Dirichlet face without an exterior state");
        const double* xt = geom.face_xt(e, f, q);
        qout = bc.exterior(xt[0], dim == 2 ? xt[1] : 0.0, xt[dim]);
      } else {
        qout = load(trace.data() + face_index(link.elem, link.face, L.neighbor_face_point(q, link.reversed)), nv);
      }
      State fc;
      try {
        fc = common_flux(eq, qin, qout, std::span<const double>(n.data(), static_cast<std::size_t>(nd)));
      } catch (const NonPhysicalState& ex) {
        throw NonPhysicalState(where(e, "face " + std::to_string(f) + " point " + std::to_string(q) + ": " + ex.what()));
      }
      for (int v = 0; v < nv; ++v) fc[static_cast<std::size_t>(v)] *= s * nrm;
      return fc;
    };

    for (int d = 0; d < nd; ++d) {
      const bool temporal = d == dim;
      const BasisSet& b = temporal ? time : space;
      const int nb = b.size();
      const int st = L.stride[static_cast<std::size_t>(d)];
      const auto& bases = L.line_base[static_cast<std::size_t>(d)];
      const double* F = contra[static_cast<std::size_t>(d)].data();
      for (std::size_t qi = 0; qi < bases.size(); ++qi) {
        const int q = static_cast<int>(qi);
        const int p0 = bases[qi];
        State left, right;
        if (!temporal) {
          left = spatial_common(2 * d, q);
          right = spatial_common(2 * d + 1, q);
        } else {
          const double jb = geom.time_face_jac(e, 0, q);
          const double jt = geom.time_face_jac(e, 1, q);
          const auto& er = time.extrap_right();
          for (int v = 0; v < nv; ++v) {
            double top = 0.0;
            for (int m = 0; m < nb; ++m) top += er[static_cast<std::size_t>(m)] * field.at(e, p0 + m * st, v);
            left[static_cast<std::size_t>(v)] = jb * inflow.at(e, q, v);
            right[static_cast<std::size_t>(v)] = jt * top;
          }
        }
        for (int v = 0; v < nv; ++v) {
          fr_line_derivative(b, F + static_cast<std::size_t>(p0 * nv + v), st * nv, left[static_cast<std::size_t>(v)],
                             right[static_cast<std::size_t>(v)], line.data(), 1);
          for (int j = 0; j < nb; ++j) div[static_cast<std::size_t>((p0 + j * st) * nv + v)] += line[static_cast<std::size_t>(j)];
        }
      }
    }

    for (int p = 0; p < np; ++p) {
      const double inv = 1.0 / geom.jac(e, p);
      const State src = source(eq, field.state(e, p));
      for (int v = 0; v < nv; ++v)
        res.at(e, p, v) = -div[static_cast<std::size_t>(p * nv + v)] * inv + src[static_cast<std::size_t>(v)];
    }
  }
  return res;
}

double PseudoStats::drop() const {
  if (initial_norm <= 0.0) return 0.0;
  if (final_norm <= 0.0) return INFINITY;
  return std::log10(initial_norm / final_norm);
}

namespace {

// Largest stable SSP-RK3 step, in units of (reference cell width / speed), of
// the 1D upwind FR operator per degree: periodic (spatial) and single element
// with inflow (temporal). Computed from the operator spectra.
constexpr std::array<double, 11> kSpatialLimit{1.2564, 0.4099, 0.2098, 0.1301, 0.0897, 0.0661,
                                               0.0510, 0.0407, 0.0334, 0.0279, 0.0237};
constexpr std::array<double, 11> kTemporalLimit{2.5127, 0.9520, 0.5936, 0.4327, 0.3371, 0.2737,
                                                0.2290, 0.1960, 0.1707, 0.1509, 0.1349};

double stability_limit(const std::array<double, 11>& table, int k) {
  if (k < static_cast<int>(table.size())) return table[static_cast<std::size_t>(k)];
  const double r = static_cast<double>(table.size()) / (k + 1);
  return table.back() * r * r;
}

}  // namespace

double pseudo_step(const StateField& field, const SlabGeometry& geom, const EquationSet& eq, double cfl) {
  if (!(cfl > 0.0)) throw std::invalid_argument("pseudo_step: cfl must be positive");
  const StLayout& L = geom.layout();
  const int nd = L.dim + 1;
  std::array<double, 3> limit{};
  for (int d = 0; d < nd; ++d)
    limit[static_cast<std::size_t>(d)] =
        d < L.dim ? stability_limit(kSpatialLimit, L.ns - 1) : stability_limit(kTemporalLimit, L.nt - 1);
  const double lam = std::holds_alternative<LinearOde>(eq) ? std::abs(std::get<LinearOde>(eq).lambda) : 0.0;
  double rate = 0.0;
  for (int e = 0; e < geom.n_elems(); ++e) {
    const double* M = geom.metric_ptr(e);
    for (int p = 0; p < L.n_points; ++p) {
      const State q = field.state(e, p);
      double s = 0.0;
      for (int d = 0; d < nd; ++d) {
        const std::span<const double> row(M + static_cast<std::size_t>((p * nd + d) * nd), static_cast<std::size_t>(nd));
        s += st_wave_speed(eq, q, row) / (2.0 * limit[static_cast<std::size_t>(d)]);
      }
      rate = std::max(rate, s / geom.jac(e, p) + lam / 1.25);
    }
  }
  return cfl / rate;
}

double residual_norm(const StateField& r) {
  double s = 0.0;
  for (double v : r.values) s += v * v;
  return r.values.empty() ? 0.0 : std::sqrt(s / static_cast<double>(r.values.size()));
}

void ssp_rk3_cycle(std::vector<double>& q, std::vector<double>& r, double h, const ResidualEval& eval) {
  if (q.size() != r.size()) throw std::invalid_argument("ssp_rk3_cycle: state and residual sizes differ");
  const std::size_t n = q.size();
  const std::vector<double> q0 = q;
  for (std::size_t i = 0; i < n; ++i) q[i] = q0[i] + h * r[i];
  eval(q, r);
  for (std::size_t i = 0; i < n; ++i) q[i] = 0.75 * q0[i] + 0.25 * (q[i] + h * r[i]);
  eval(q, r);
  for (std::size_t i = 0; i < n; ++i) q[i] = q0[i] / 3.0 + 2.0 / 3.0 * (q[i] + h * r[i]);
  eval(q, r);
}

PseudoStats pseudo_march(StateField& field, const SlabGeometry& geom, const SlabInflow& inflow, const EquationSet& eq,
                         const BoundaryCondition& bc, const Mesh& mesh, const BasisSet& space, const BasisSet& time,
                         const PseudoControls& controls) {
  if (!(controls.cfl > 0.0)) throw std::invalid_argument("pseudo_march: cfl must be positive");
  if (controls.drop_orders < 1) throw std::invalid_argument("pseudo_march: drop_orders must be at least 1");
  if (controls.max_iters < 1) throw std::invalid_argument("pseudo_march: max_iters must be at least 1");

  PseudoStats stats;
  stats.dtau = pseudo_step(field, geom, eq, controls.cfl);
  const double h = stats.dtau;
  auto r = st_residual(field, geom, inflow, eq, bc, mesh, space, time);
  stats.initial_norm = stats.final_norm = residual_norm(r);
  double qmax = 1.0;
  for (double v : field.values) qmax = std::max(qmax, std::abs(v));
  // The absolute floor bounds the pseudo-time increment |R| dtau relative to the state size.
  const double floor = controls.abs_floor * qmax / h;
  const double target = std::max(floor, stats.initial_norm * std::pow(10.0, -controls.drop_orders));
  if (stats.initial_norm <= target) {
    stats.converged = true;
    return stats;
  }

  const ResidualEval eval = [&](const std::vector<double>&, std::vector<double>& out) {
    out = st_residual(field, geom, inflow, eq, bc, mesh, space, time).values;
  };
  while (stats.iterations < controls.max_iters) {
    ssp_rk3_cycle(field.values, r.values, h, eval);
    ++stats.iterations;
    stats.final_norm = residual_norm(r);
    if (!std::isfinite(stats.final_norm) || stats.final_norm > 1e8 * stats.initial_norm) {
      std::ostringstream os;
      os << "pseudo-time iteration diverged on slab " << field.slab << " after " << stats.iterations
         << " iterations (residual " << stats.final_norm << ")";
      throw NonConvergence(os.str(), stats);
    }
    if (stats.final_norm <= target) {
      stats.converged = true;
      return stats;
    }
  }
  if (!controls.accept_unconverged) {
    std::ostringstream os;
    os << "pseudo-time iteration did not converge on slab " << field.slab << ": " << stats.iterations
       << " iterations, residual dropped " << stats.drop() << " of " << controls.drop_orders << " orders";
    throw NonConvergence(os.str(), stats);
  }
  return stats;
}

SlabInflow sample_spatial(const Mesh& mesh, std::span<const Point> coords, const BasisSet& space, int n_vars,
                          const StateFunction& fn, double t) {
  const int dim = mesh.dim();
  const int ns = space.size();
  const int sp = dim == 1 ? ns : ns * ns;
  const auto& xs = space.nodes();
  SlabInflow out(n_vars, mesh.n_elems(), sp);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto c = element_corners(mesh, coords, e);
    for (int q = 0; q < sp; ++q) {
      const double eta = dim == 2 ? xs[static_cast<std::size_t>(q / ns)] : 0.0;
      const auto sm = eval_spatial_map(dim, c, xs[static_cast<std::size_t>(q % ns)], eta);
      const State s = fn(sm.x[0], dim == 2 ? sm.x[1] : 0.0, t);
      for (int v = 0; v < n_vars; ++v) out.at(e, q, v) = s[static_cast<std::size_t>(v)];
    }
  }
  return out;
}

SlabInflow top_values(const StateField& field, const BasisSet& time) {
  const StLayout& L = field.layout;
  const int sp = L.spatial_points();
  SlabInflow out(field.n_vars, field.n_elems, sp);
  const auto& er = time.extrap_right();
  for (int e = 0; e < field.n_elems; ++e)
    for (int q = 0; q < sp; ++q)
      for (int v = 0; v < field.n_vars; ++v) {
        double s = 0.0;
        for (int m = 0; m < L.nt; ++m) s += er[static_cast<std::size_t>(m)] * field.at(e, q + sp * m, v);
        out.at(e, q, v) = s;
      }
  return out;
}

SlabResult advance_slab(const SlabInflow& inflow, const Mesh& mesh, std::vector<Point> coords_n,
                        std::vector<Point> coords_np1, double t0, double dt, const EquationSet& eq,
                        const BoundaryCondition& bc, const BasisSet& space, const BasisSet& time,
                        const PseudoControls& controls, int slab_index) {
  SlabResult out;
  out.geom = SlabGeometry(mesh, std::move(coords_n), std::move(coords_np1), t0, dt, space, time);
  const StLayout& L = out.geom.layout();
  const int sp = L.spatial_points();
  out.field = StateField(L, inflow.n_vars, mesh.n_elems());
  out.field.slab = slab_index;
  out.field.t0 = t0;
  out.field.dt = dt;
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int p = 0; p < L.n_points; ++p)
      for (int v = 0; v < inflow.n_vars; ++v) out.field.at(e, p, v) = inflow.at(e, p % sp, v);
  out.stats = pseudo_march(out.field, out.geom, inflow, eq, bc, mesh, space, time, controls);
  out.top = top_values(out.field, time);
  return out;
}

std::vector<Point> initial_coords(const MotionPrescription& m, const Mesh& mesh) {
  return is_closed_form(m) ? node_positions(m, mesh, 0.0) : mesh.nodes();
}

int step_count(double t_final, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  const double n = std::round(t_final / dt);
  if (n < 1.0 || std::abs(n * dt - t_final) > 1e-12 * std::max(1.0, std::abs(t_final)))
    throw std::invalid_argument("t_final must be an integer multiple of dt");
  return static_cast<int>(n);
}

StRunResult run_spacetime(const Mesh& mesh, const StProblem& prob, const std::function<void(const SlabResult&)>& on_slab) {
  if (spatial_dim(prob.eq) != mesh.dim()) throw std::invalid_argument("equation and mesh dimensions differ");
  if (!prob.initial) throw std::invalid_argument("run_spacetime: missing initial condition");
  const BasisSet space(prob.ks);
  const BasisSet time(prob.kt);
  const int steps = step_count(prob.t_final, prob.dt);
  StRunResult run;
  auto coords = initial_coords(prob.motion, mesh);
  SlabInflow inflow = sample_spatial(mesh, coords, space, n_vars(prob.eq), prob.initial, 0.0);
  run.min_drop = INFINITY;
  for (int n = 0; n < steps; ++n) {
    const double t0 = n * prob.dt;
    auto next = advance_positions(prob.motion, mesh, coords, t0, prob.dt);
    SlabResult slab = advance_slab(inflow, mesh, coords, next, t0, prob.dt, prob.eq, prob.bc, space, time,
                                   prob.controls, n);
    run.total_iterations += slab.stats.iterations;
    if (slab.stats.iterations > 0) run.min_drop = std::min(run.min_drop, slab.stats.drop());
    if (!slab.stats.converged) ++run.unconverged_slabs;
    if (on_slab) on_slab(slab);
    inflow = slab.top;
    coords = std::move(next);
    run.n_slabs = n + 1;
    if (n + 1 == steps) run.last = std::move(slab);
  }
  run.final_coords = std::move(coords);
  return run;
}

}  // namespace stfr
