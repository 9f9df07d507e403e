#include "stow/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace stow {

Polyhedron build_step_polyhedron(double q_residual, int teu_k, double w_k,
                                 const Eigen::VectorXd& residual_capacity,
                                 const Geometry& geom, const VoyageConfig& cfg,
                                 double tw, double lm, double vm) {
  const int n = static_cast<int>(residual_capacity.size());
  const int m = 1 + n + 4;
  Polyhedron ph;
  ph.A = Eigen::MatrixXd::Zero(m, n);
  ph.b = Eigen::VectorXd::Zero(m);
  ph.kind.resize(m);
  ph.soft.assign(m, 0);

  ph.A.row(0).setOnes();
  ph.b(0) = q_residual;
  ph.kind[0] = RowKind::demand;

  for (int loc = 0; loc < n; ++loc) {
    ph.A(1 + loc, loc) = static_cast<double>(teu_k);
    ph.b(1 + loc) = residual_capacity(loc);
    ph.kind[1 + loc] = RowKind::capacity;
  }

  // post-step center of gravity stays inside the seaworthiness envelope;
  // rows are linear in x given the pre-step aggregates (tw, lm, vm)
  const int s = 1 + n;
  for (int loc = 0; loc < n; ++loc) {
    ph.A(s + 0, loc) = w_k * (cfg.lcg_lb - geom.ld(loc));
    ph.A(s + 1, loc) = w_k * (geom.ld(loc) - cfg.lcg_ub);
    ph.A(s + 2, loc) = w_k * (cfg.vcg_lb - geom.vd(loc));
    ph.A(s + 3, loc) = w_k * (geom.vd(loc) - cfg.vcg_ub);
  }
  ph.b(s + 0) = lm - cfg.lcg_lb * tw;
  ph.b(s + 1) = cfg.lcg_ub * tw - lm;
  ph.b(s + 2) = vm - cfg.vcg_lb * tw;
  ph.b(s + 3) = cfg.vcg_ub * tw - vm;
  ph.kind[s + 0] = RowKind::lcg_lb;
  ph.kind[s + 1] = RowKind::lcg_ub;
  ph.kind[s + 2] = RowKind::vcg_lb;
  ph.kind[s + 3] = RowKind::vcg_ub;
  for (int i = 0; i < 4; ++i) ph.soft[s + i] = 1;
  return ph;
}

Polyhedron build_polyhedron(const Env& env) {
  const auto& st = env.current_step();
  const CargoClass& kc = env.classes()[st.k];
  return build_step_polyhedron(env.residual_demand_current(), kc.teu,
                               kc.weight, env.residual_capacity(),
                               env.geometry(), env.config(),
                               env.total_weight(), env.longitudinal_moment(),
                               env.vertical_moment());
}

Eigen::VectorXd violation(const Polyhedron& ph, const Eigen::VectorXd& x) {
  return (ph.A * x - ph.b).cwiseMax(0.0);
}

double total_violation(const Polyhedron& ph, const Eigen::VectorXd& x) {
  return violation(ph, x).sum();
}

VpResult vp_project(const Eigen::VectorXd& x0, const Polyhedron& ph,
                    const VpParams& params,
                    const std::optional<Eigen::VectorXd>& mask) {
  const int m = ph.m(), n = ph.n();
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const double nrm = ph.A.row(i).norm();
    if (nrm > 0.0) {
      A.row(i) = ph.A.row(i) / nrm;
      b(i) = ph.b(i) / nrm;
    } else {
      A.row(i).setZero();
      b(i) = std::max(ph.b(i), 0.0);
    }
  }
  VpResult res;
  Eigen::VectorXd x = x0.cwiseMax(0.0);
  if (mask) x = x.cwiseProduct(*mask);
  Eigen::VectorXd v = (A * x - b).cwiseMax(0.0);
  double prev = v.sum();
  res.initial_violation = prev;
  int it = 0;
  for (; it < params.epochs; ++it) {
    if (prev <= 0.0) break;
    x -= params.eta * (A.transpose() * v);
    x = x.cwiseMax(0.0);
    if (mask) x = x.cwiseProduct(*mask);
    v = (A * x - b).cwiseMax(0.0);
    const double cur = v.sum();
    if (!params.train_mode && prev - cur <= params.delta_v) {
      prev = cur;
      ++it;
      break;
    }
    prev = cur;
  }
  res.x = std::move(x);
  res.iterations = it;
  res.final_violation = prev;
  return res;
}

Eigen::VectorXd clip_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lb,
                         const Eigen::VectorXd& ub) {
  return x.cwiseMax(lb).cwiseMin(ub);
}

Eigen::VectorXd capacity_box(const Polyhedron& ph) {
  Eigen::VectorXd ub = Eigen::VectorXd::Constant(ph.n(), 1e300);
  for (int i = 0; i < ph.m(); ++i) {
    if (ph.kind[i] != RowKind::capacity) continue;
    for (int j = 0; j < ph.n(); ++j) {
      const double a = ph.A(i, j);
      if (a > 0.0) ub(j) = std::min(ub(j), std::max(0.0, ph.b(i)) / a);
    }
  }
  return ub;
}

CpResult cp_project(const Eigen::VectorXd& x0, const Polyhedron& ph,
                    const CpParams& params,
                    const std::optional<Eigen::VectorXd>& mask) {
  // support coordinates: masked-out entries are pinned at zero
  std::vector<int> sup;
  for (int j = 0; j < ph.n(); ++j)
    if (!mask || (*mask)(j) > 0.0) sup.push_back(j);
  const int ns = static_cast<int>(sup.size());

  // rows: polyhedron rows (capacity bounds clamped at zero: an already
  // over-full location admits no new load), then one nonnegativity row per
  // support coordinate; soft rows get capped multipliers
  struct DRow {
    Eigen::VectorXd a;
    double b;
    double cap;
    double nrm2;
  };
  std::vector<DRow> rows;
  for (int i = 0; i < ph.m(); ++i) {
    DRow r;
    r.a.resize(ns);
    for (int j = 0; j < ns; ++j) r.a(j) = ph.A(i, sup[j]);
    r.b = ph.b(i);
    if (ph.kind[i] == RowKind::capacity || ph.kind[i] == RowKind::demand)
      r.b = std::max(r.b, 0.0);
    r.cap = ph.soft[i] ? params.lambda_soft : 1e300;
    r.nrm2 = r.a.squaredNorm();
    if (r.nrm2 > 0.0) rows.push_back(std::move(r));
  }
  for (int j = 0; j < ns; ++j) {
    DRow r;
    r.a = Eigen::VectorXd::Zero(ns);
    r.a(j) = -1.0;
    r.b = 0.0;
    r.cap = 1e300;
    r.nrm2 = 1.0;
    rows.push_back(std::move(r));
  }

  Eigen::VectorXd xs(ns);
  for (int j = 0; j < ns; ++j) xs(j) = x0(sup[j]);
  const int nr = static_cast<int>(rows.size());
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(nr);

  const double omega = 1.5;  // over-relaxed dual coordinate ascent
  double kkt = 0.0;
  int sweep = 0;
  for (; sweep < params.max_sweeps; ++sweep) {
    for (int i = 0; i < nr; ++i) {
      const DRow& r = rows[i];
      const double resid = r.a.dot(xs) - r.b;
      const double target =
          std::clamp(nu(i) + omega * resid / r.nrm2, 0.0, r.cap);
      const double dnu = target - nu(i);
      if (dnu != 0.0) {
        xs -= dnu * r.a;
        nu(i) = target;
      }
    }
    // projected dual gradient, per unit row norm
    kkt = 0.0;
    for (int i = 0; i < nr; ++i) {
      const DRow& r = rows[i];
      const double resid = r.a.dot(xs) - r.b;
      double g;
      if (nu(i) <= 0.0)
        g = std::max(resid, 0.0);
      else if (nu(i) >= r.cap)
        g = std::min(resid, 0.0);
      else
        g = resid;
      kkt = std::max(kkt, std::abs(g) / std::sqrt(r.nrm2));
    }
    if (kkt <= params.tol) break;
  }

  CpResult res;
  res.kkt_residual = kkt;
  res.sweeps = sweep;
  res.converged = kkt <= params.tol;
  if (!res.converged) {
    std::ostringstream os;
    os << "cp_project: no convergence after " << sweep
       << " sweeps, KKT residual " << kkt;
    throw std::runtime_error(os.str());
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ph.n());
  for (int j = 0; j < ns; ++j) x(sup[j]) = std::max(0.0, xs(j));
  res.x = std::move(x);
  return res;
}

Eigen::VectorXd apply_mask(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& mask) {
  return x.cwiseProduct(mask);
}

Eigen::VectorXd pbs_mask_scored(const Env& env,
                                const Eigen::VectorXd& raw_scores) {
  const VoyageConfig& cfg = env.config();
  const TransportIndex& ti = env.transports();
  const int n_loc = cfg.n_locations();
  const int n_k = static_cast<int>(env.classes().size());
  const int p = env.current_port();
  const int pod = env.current_step().pod;
  const double tol = cfg.feas_tol;

  // remaining demand headed for this POD among loads not yet sailed past
  double q_pod = 0.0;
  for (int tr = 0; tr < ti.size(); ++tr) {
    const Transport t = ti.at(tr);
    if (t.pod != pod || t.pol < p || !env.port_revealed(t.pol)) continue;
    for (int k = 0; k < n_k; ++k) q_pod += env.residual_demand(tr, k);
  }

  // location status: which POD owns each location, if any
  std::vector<int> owner(n_loc, 0);  // 0 none, else pod
  std::vector<char> multi(n_loc, 0);
  for (int loc = 0; loc < n_loc; ++loc) {
    for (int j = 2; j <= cfg.n_ports; ++j) {
      double v = 0.0;
      for (int tr = 0; tr < ti.size(); ++tr) {
        if (ti.at(tr).pod != j) continue;
        for (int k = 0; k < n_k; ++k) v += env.onboard(loc, tr, k);
      }
      if (v > tol) {
        if (owner[loc] != 0) multi[loc] = 1;
        owner[loc] = j;
      }
    }
  }
  const Eigen::VectorXd& c_res = env.residual_capacity();

  double used_capacity = 0.0;  // residual space in locations already on POD
  std::vector<char> ul(n_loc, 0), el(n_loc, 0);
  for (int loc = 0; loc < n_loc; ++loc) {
    el[loc] = owner[loc] == 0 && !multi[loc];
    ul[loc] = owner[loc] == pod && !multi[loc];
    if (ul[loc]) used_capacity += std::max(0.0, c_res(loc));
  }

  const double rq = std::max(0.0, q_pod - used_capacity);
  const double fq = std::min(std::max(0.0, c_res.sum()), rq);

  // bay-blocks empty on both decks are candidates; mirrored random scores
  const int nbb = cfg.n_bays * cfg.n_blocks;
  std::vector<double> score(nbb, 0.0);
  std::vector<char> bb_empty(nbb, 0);
  for (int b = 0; b < cfg.n_bays; ++b)
    for (int bl = 0; bl < cfg.n_blocks; ++bl) {
      const int bb = b * cfg.n_blocks + bl;
      bool empty = true;
      for (int d = 0; d < cfg.n_decks; ++d)
        if (!el[cfg.location_index(b, d, bl)]) empty = false;
      bb_empty[bb] = empty;
      const int mirror = std::min(b, cfg.n_bays - 1 - b);
      score[bb] = empty ? raw_scores(mirror * cfg.n_blocks + bl) : 0.0;
    }

  std::vector<int> order(nbb);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b2) {
    if (score[a] != score[b2]) return score[a] > score[b2];
    return a < b2;
  });

  std::vector<char> selected(nbb, 0);
  if (fq > tol) {
    double cum = 0.0;
    for (int bb : order) {
      if (!bb_empty[bb]) continue;
      const int b = bb / cfg.n_blocks, bl = bb % cfg.n_blocks;
      selected[bb] = 1;
      for (int d = 0; d < cfg.n_decks; ++d)
        cum += std::max(0.0, c_res(cfg.location_index(b, d, bl)));
      if (cum >= fq) break;
    }
  }

  Eigen::VectorXd mask = Eigen::VectorXd::Zero(n_loc);
  for (int b = 0; b < cfg.n_bays; ++b)
    for (int bl = 0; bl < cfg.n_blocks; ++bl)
      for (int d = 0; d < cfg.n_decks; ++d) {
        const int loc = cfg.location_index(b, d, bl);
        if (selected[b * cfg.n_blocks + bl] || ul[loc]) mask(loc) = 1.0;
      }
  return mask;
}

Eigen::VectorXd pbs_mask(const Env& env, Rng& rng) {
  const VoyageConfig& cfg = env.config();
  Eigen::VectorXd sc(cfg.n_bays * cfg.n_blocks);
  for (int b = 0; b < cfg.n_bays; ++b)
    for (int bl = 0; bl < cfg.n_blocks; ++bl)
      sc(b * cfg.n_blocks + bl) = rng.uniform();
  return pbs_mask_scored(env, sc);
}

PipelineSpec PipelineSpec::parse(const std::string& name) {
  PipelineSpec spec;
  if (name == "none" || name.empty()) return spec;
  if (name == "vp-star") {
    spec.use_mask = true;
    spec.projection = Projection::vp;
    spec.vp.eta = 0.01;
    spec.vp.epochs = 300;
    spec.vp.delta_v = 0.01;
    return spec;
  }
  std::stringstream ss(name);
  std::string tok;
  while (std::getline(ss, tok, '/')) {
    if (tok == "PBS") {
      spec.use_mask = true;
    } else if (tok == "VP" || tok == "VP*") {
      if (spec.projection != Projection::none)
        throw std::invalid_argument("pipeline: VP and CP are exclusive");
      spec.projection = Projection::vp;
      if (tok == "VP*") {
        spec.vp.epochs = 300;
        spec.vp.delta_v = 0.01;
      }
    } else if (tok == "CP") {
      if (spec.projection != Projection::none)
        throw std::invalid_argument("pipeline: VP and CP are exclusive");
      spec.projection = Projection::cp;
    } else if (tok == "PC") {
      spec.use_pc = true;
    } else {
      throw std::invalid_argument("pipeline: unknown stage '" + tok + "'");
    }
  }
  return spec;
}

std::string PipelineSpec::str() const {
  std::string s;
  auto app = [&](const char* t) {
    if (!s.empty()) s += "/";
    s += t;
  };
  if (use_mask) app("PBS");
  if (projection == Projection::vp) app("VP");
  if (projection == Projection::cp) app("CP");
  if (use_pc) app("PC");
  return s.empty() ? "none" : s;
}

PipelineResult run_pipeline(const Env& env, const PipelineSpec& spec,
                            const Eigen::VectorXd& x_raw, Rng& mask_rng,
                            bool train_mode) {
  PipelineResult out;
  out.ph = build_polyhedron(env);
  Eigen::VectorXd x = x_raw.cwiseMax(0.0);
  if (spec.use_mask) {
    out.mask = pbs_mask(env, mask_rng);
    x = apply_mask(x, *out.mask);
  }
  out.violation_before = total_violation(out.ph, x);
  if (spec.projection == PipelineSpec::Projection::vp) {
    VpParams vp = spec.vp;
    vp.train_mode = train_mode;
    x = vp_project(x, out.ph, vp, out.mask).x;
  } else if (spec.projection == PipelineSpec::Projection::cp) {
    x = cp_project(x, out.ph, spec.cp, out.mask).x;
  }
  if (spec.use_pc) {
    x = clip_box(x, Eigen::VectorXd::Zero(x.size()), capacity_box(out.ph));
  }
  out.violation_after = total_violation(out.ph, x);
  out.x = std::move(x);
  return out;
}

}  // namespace stow
