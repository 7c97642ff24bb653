#include "equilex/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace equilex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Next pool entries probed for properties (5) and (6) besides the tail window.
constexpr std::size_t kLeadingProbes = 3;

// Everything the residual map needs, detached from the state it came from.
struct CandidateContext {
  NormOracle oracle;
  std::vector<Point> points;
  Point zK;
  std::vector<Point> tails;
  double tol = 0.0;

  Point g(const Eigen::VectorXd& a) const {
    const std::size_t n = points.size();
    Point out = zK;
    out *= 1.0 + a(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) out.axpy(a(static_cast<Eigen::Index>(i)), points[i]);
    return out;
  }

  Eigen::VectorXd values(const Eigen::VectorXd& a) const {
    const std::size_t n = points.size();
    const Point p = g(a);
    Eigen::VectorXd f(static_cast<Eigen::Index>(n + 1));
    for (std::size_t j = 0; j < n; ++j) {
      f(static_cast<Eigen::Index>(j)) = norm(oracle, p - points[j]);
    }
    std::vector<double> tail_values;
    tail_values.reserve(tails.size());
    for (const Point& t : tails) tail_values.push_back(norm(oracle, p - t));
    f(static_cast<Eigen::Index>(n)) = window_limit(tail_values);
    return f;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& a) const {
    const std::size_t n = points.size();
    const auto size = static_cast<Eigen::Index>(n + 1);
    const Point p = g(a);
    Eigen::MatrixXd J(size, size);
    for (std::size_t j = 0; j < n; ++j) {
      const SupportFunctional phi = support_functional(oracle, p - points[j]);
      const auto row = static_cast<Eigen::Index>(j);
      for (std::size_t c = 0; c < n; ++c) {
        J(row, static_cast<Eigen::Index>(c)) = apply_functional(phi, points[c]);
      }
      J(row, size - 1) = apply_functional(phi, zK);
    }
    // Row N+1: lim_m φ_{g − z_m}(·), one functional per window index.
    std::vector<std::vector<double>> columns(n + 1, std::vector<double>(tails.size()));
    for (std::size_t m = 0; m < tails.size(); ++m) {
      const SupportFunctional phi = support_functional(oracle, p - tails[m]);
      for (std::size_t c = 0; c < n; ++c) columns[c][m] = apply_functional(phi, points[c]);
      columns[n][m] = apply_functional(phi, zK);
    }
    for (std::size_t c = 0; c <= n; ++c) {
      J(size - 1, static_cast<Eigen::Index>(c)) = window_limit(columns[c]);
    }
    return J;
  }

  double window_limit(const std::vector<double>& v) const {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return tail_limit([&v](std::size_t i) { return v[i]; }, idx, tol);
  }
};

std::shared_ptr<const CandidateContext> make_context(const ConstructionState& state,
                                                     std::size_t K) {
  auto ctx = std::make_shared<CandidateContext>();
  ctx->oracle = state.oracle;
  ctx->points = state.points;
  ctx->zK = state.z()(K);
  const TailWindows w = state.windows();
  for (std::size_t m : w.outer) {
    if (m <= K) {
      std::ostringstream os;
      os << "tail index " << m << " does not lie past candidate " << K;
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
    ctx->tails.push_back(state.z()(m));
  }
  ctx->tol = state.policy.tol;
  return ctx;
}

std::uint64_t step_seed(std::uint64_t base, std::size_t step, std::size_t K) {
  return base + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(step) +
         static_cast<std::uint64_t>(K);
}

// Indices L ∈ M_N at which (5) and (6) are probed.
std::vector<std::size_t> probe_indices(const ConstructionState& state,
                                       const TailWindows& w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.pool.size() && i < kLeadingProbes; ++i) {
    out.push_back(state.pool[i]);
  }
  for (std::size_t m : w.outer) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

PropertyCheck make_check(int id, std::string name) {
  PropertyCheck c;
  c.id = id;
  c.name = std::move(name);
  return c;
}

void mark_error(PropertyCheck& c, const Error& e) {
  c.passed = false;
  c.measured = kInf;
  c.slack = -kInf;
  c.name += " [" + std::string(to_string(e.kind())) + ": " + e.what() + "]";
}

}  // namespace

std::string to_string(GateMode mode) {
  return mode == GateMode::kSchedule ? "schedule" : "certified";
}

GateMode parse_gate_mode(const std::string& name) {
  if (name == "schedule") return GateMode::kSchedule;
  if (name == "certified") return GateMode::kCertified;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown gate mode '" + name + "' (expected schedule or certified)");
}

TailWindows ConstructionState::windows() const { return tail_windows(pool, policy); }

ConstructionState initial_state(const NormOracle& oracle, const SequenceSource& raw,
                                const TailPolicy& policy, const BuilderOptions& options) {
  policy.validate();
  if (options.n_points < 1) {
    throw Error(ErrorKind::kInvalidArgument, "n_points must be at least 1");
  }
  if (raw.dim() != oracle.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "sequence and norm dimensions differ");
  }
  ConstructionState s;
  s.oracle = oracle;
  s.stab = kill_functional_limits(raw, oracle, policy, options.lambda_margin);
  s.lambda = s.stab.lambda;
  s.C = s.stab.C;
  s.policy = policy;
  s.options = options;
  s.sched = eps_schedule(s.C, options.n_points);
  s.gate_sched = options.gate == GateMode::kSchedule
                     ? s.sched
                     : working_schedule(s.C, options.n_points, options.eps_scale);
  s.points.push_back(s.z()(1));
  for (std::size_t i = 2; i <= s.z().max_index(); ++i) s.pool.push_back(i);
  (void)s.windows();  // fails early when the pool cannot host the tail windows
  return s;
}

Point candidate_point(const ConstructionState& state, std::size_t K,
                      const Eigen::VectorXd& a) {
  if (a.size() != static_cast<Eigen::Index>(state.points.size() + 1)) {
    throw Error(ErrorKind::kDimensionMismatch, "coefficient vector must have N+1 entries");
  }
  Point out = state.z()(K);
  out *= 1.0 + a(a.size() - 1);
  for (std::size_t i = 0; i < state.points.size(); ++i) {
    out.axpy(a(static_cast<Eigen::Index>(i)), state.points[i]);
  }
  return out;
}

Eigen::VectorXd residual_offset(const ConstructionState& state, std::size_t K) {
  const auto ctx = make_context(state, K);
  return ctx->values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state.points.size() + 1)));
}

DifferentiableMap residual_map(const ConstructionState& state, std::size_t K,
                               double domain_radius) {
  const auto ctx = make_context(state, K);
  const Eigen::VectorXd base =
      ctx->values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state.points.size() + 1)));
  DifferentiableMap m;
  m.dim = state.points.size() + 1;
  m.domain_radius = domain_radius;
  m.eval = [ctx, base](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    return ctx->values(a) - base;
  };
  m.jacobian = [ctx](const Eigen::VectorXd& a) -> Eigen::MatrixXd {
    return ctx->jacobian(a);
  };
  return m;
}

Eigen::MatrixXd jacobian_at(const ConstructionState& state, std::size_t K,
                            const Eigen::VectorXd& a) {
  return make_context(state, K)->jacobian(a);
}

GateMatrix jacobian_at_zero(const ConstructionState& state, std::size_t K) {
  return GateMatrix{
      jacobian_at(state, K, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state.points.size() + 1)))};
}

ConstructionState extend_one(const ConstructionState& state) {
  const std::size_t n = state.points.size();
  const std::size_t step = n + 1;
  if (step > state.options.n_points || step < 2) {
    std::ostringstream os;
    os << "cannot add point " << step << " to a run targeting "
       << state.options.n_points;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  const BuilderOptions& opt = state.options;
  StepLog log;
  log.step = step;
  log.gate.inverse_bound = state.sched.R_at(step);
  const double delta = std::min(state.gate_sched.eps_at(step) / 4.0, opt.delta_cap);
  log.delta = delta;

  std::size_t retries = 0;
  for (std::size_t K : state.pool) {
    if (K >= state.policy.start) break;
    if (retries > opt.k_retries) break;

    GateRecord gate;
    gate.inverse_bound = log.gate.inverse_bound;
    try {
      const GateMatrix D = jacobian_at_zero(state, K);
      const GateMatrix A{D.entries.transpose()};
      gate.in_class = in_class(A, state.C, state.gate_sched);
      bool admitted = gate.in_class;
      if (admitted && opt.gate == GateMode::kCertified) {
        const NeumannCertificate cert = neumann_certificate(A);
        gate.contraction = cert.contraction;
        admitted = cert.ok;
      }
      if (admitted) {
        const InverseNormCheck inv = inverse_norm_check(A, gate.inverse_bound);
        gate.inverse_norm = inv.measured;
        admitted = inv.ok;
      }
      if (!admitted) {
        ++log.gate_skips;
        continue;
      }
    } catch (const Error& e) {
      // Tail or duality failures at this K make it unusable as a candidate.
      ++log.gate_skips;
      log.failures.push_back({K, e.kind(), e.what()});
      continue;
    }

    try {
      const DifferentiableMap f = residual_map(state, K, delta);
      const Eigen::VectorXd offset = residual_offset(state, K);
      const Eigen::VectorXd target =
          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(step), state.lambda) - offset;
      NewtonOptions nopt = opt.newton;
      nopt.seed = step_seed(opt.newton.seed, step, K);
      const NewtonResult res = solve(f, target, nopt);

      ConstructionState next = state;
      next.points.push_back(candidate_point(state, K, res.solution));
      next.pool.erase(next.pool.begin(),
                      std::upper_bound(next.pool.begin(), next.pool.end(), K));
      log.K = K;
      log.gate = gate;
      log.newton_iterations = res.iterations;
      log.trace = res.trace;
      log.certificate = res.certificate;
      log.guard_halvings = res.rejected.size();
      log.max_decay = res.max_decay;
      log.solution_norm = res.solution.norm();
      next.logs.push_back(log);

      const PropertyReport props = verify_properties(next);
      if (const PropertyCheck* bad = props.first_failure()) {
        std::ostringstream os;
        os << "property (" << bad->id << ") " << bad->name << " violated after adding x_"
           << step << " from K = " << K << ": measured " << bad->measured << ", bound "
           << bad->bound;
        throw StepError(ErrorKind::kInvariantViolation, os.str(), log);
      }
      return next;
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      log.failures.push_back({K, e.kind(), e.what()});
      ++retries;
    }
  }
  std::ostringstream os;
  os << "no candidate K produced x_" << step << " (" << log.gate_skips << " gate skips, "
     << retries << " solver failures)";
  throw StepError(ErrorKind::kExhaustedPool, os.str(), log);
}

bool PropertyReport::all_passed() const { return first_failure() == nullptr; }

const PropertyCheck* PropertyReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

PropertyReport verify_properties(const ConstructionState& state) {
  const NormOracle& oracle = state.oracle;
  const auto& x = state.points;
  const std::size_t n = x.size();
  const double lambda = state.lambda;
  const double prop_tol = state.options.prop_tol;
  PropertyReport report;

  // (1) pairwise distances.
  {
    PropertyCheck c = make_check(1, "pairwise distances equal lambda");
    c.bound = prop_tol;
    c.vacuous = n < 2;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        c.measured = std::max(c.measured, std::abs(norm(oracle, x[i] - x[j]) - lambda));
      }
    }
    c.slack = c.bound - c.measured;
    c.passed = c.measured <= c.bound;
    report.checks.push_back(c);
  }

  TailWindows w;
  bool windows_ok = true;
  PropertyCheck window_error = make_check(0, "");
  try {
    w = state.windows();
  } catch (const Error& e) {
    windows_ok = false;
    mark_error(window_error, e);
  }

  // (2) tail distances to the pool.
  {
    PropertyCheck c = make_check(2, "tail distance to pool equals lambda");
    c.bound = prop_tol;
    if (!windows_ok) {
      c.passed = false;
      c.measured = kInf;
      c.slack = -kInf;
      c.name += window_error.name;
    } else {
      try {
        for (std::size_t k = 0; k < n; ++k) {
          const double t = tail_limit(
              [&](std::size_t m) { return norm(oracle, x[k] - state.z()(m)); }, w.outer,
              state.policy.tol);
          c.measured = std::max(c.measured, std::abs(t - lambda));
        }
        c.slack = c.bound - c.measured;
        c.passed = c.measured <= c.bound;
      } catch (const Error& e) {
        mark_error(c, e);
      }
    }
    report.checks.push_back(c);
  }

  // (3) norm bound.
  {
    PropertyCheck c = make_check(3, "norm at most 2");
    c.bound = 2.0;
    for (const Point& p : x) c.measured = std::max(c.measured, norm(oracle, p));
    c.slack = c.bound - c.measured;
    c.passed = c.measured <= c.bound;
    report.checks.push_back(c);
  }

  // (4) vanishing double-tail functional limits.
  {
    PropertyCheck c = make_check(4, "double tail functional limit vanishes");
    c.bound = prop_tol;
    if (!windows_ok) {
      c.passed = false;
      c.measured = kInf;
      c.slack = -kInf;
      c.name += window_error.name;
    } else {
      try {
        std::vector<std::vector<SupportFunctional>> phis(w.outer.size());
        for (std::size_t a = 0; a < w.outer.size(); ++a) {
          const Point zl = state.z()(w.outer[a]);
          for (std::size_t b = 0; b < w.inner.size(); ++b) {
            phis[a].push_back(support_functional(oracle, zl - state.z()(w.inner[b])));
          }
        }
        std::vector<std::size_t> outer_pos(w.outer.size()), inner_pos(w.inner.size());
        for (std::size_t i = 0; i < outer_pos.size(); ++i) outer_pos[i] = i;
        for (std::size_t i = 0; i < inner_pos.size(); ++i) inner_pos[i] = i;
        for (std::size_t i = 0; i < n; ++i) {
          const double v = double_tail_limit(
              [&](std::size_t a, std::size_t b) { return apply_functional(phis[a][b], x[i]); },
              TailWindows{outer_pos, inner_pos}, state.policy.tol);
          c.measured = std::max(c.measured, std::abs(v));
        }
        c.slack = c.bound - c.measured;
        c.passed = c.measured <= c.bound;
      } catch (const Error& e) {
        mark_error(c, e);
      }
    }
    report.checks.push_back(c);
  }

  // (5) and (6) share the functionals φ_{z_L − x_k}.
  PropertyCheck c5 = make_check(5, "off-diagonal functionals below eps_k");
  PropertyCheck c6 = make_check(6, "diagonal functionals above C");
  c5.bound = 1.0;
  c5.vacuous = n < 2;
  c6.bound = state.C;
  c6.measured = kInf;
  if (!windows_ok) {
    for (PropertyCheck* c : {&c5, &c6}) {
      c->passed = false;
      c->measured = kInf;
      c->slack = -kInf;
      c->name += window_error.name;
    }
  } else {
    try {
      for (std::size_t L : probe_indices(state, w)) {
        const Point zL = state.z()(L);
        for (std::size_t k = 0; k < n; ++k) {
          const SupportFunctional phi = support_functional(oracle, zL - x[k]);
          c6.measured = std::min(c6.measured, std::abs(apply_functional(phi, x[k])));
          if (k == 0) continue;
          const double eps = state.gate_sched.eps_at(k + 1);
          for (std::size_t i = 0; i < k; ++i) {
            c5.measured = std::max(c5.measured, std::abs(apply_functional(phi, x[i])) / eps);
          }
        }
      }
      c5.slack = c5.bound - c5.measured;
      c5.passed = c5.measured < c5.bound;
      c6.slack = c6.measured - c6.bound;
      c6.passed = c6.measured > c6.bound;
    } catch (const Error& e) {
      mark_error(c5, e);
      mark_error(c6, e);
    }
  }
  report.checks.push_back(c5);
  report.checks.push_back(c6);
  return report;
}

DistanceSummary distance_summary(const NormOracle& oracle, const std::vector<Point>& points,
                                 double lambda) {
  DistanceSummary s;
  const std::size_t n = points.size();
  s.matrix.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = norm(oracle, points[i] - points[j]);
      s.matrix[i][j] = d;
      s.matrix[j][i] = d;
      s.defect = std::max(s.defect, std::abs(d - lambda));
    }
  }
  return s;
}

BuildOutcome run_build(const NormOracle& oracle, const SequenceSource& raw,
                       const TailPolicy& policy, const BuilderOptions& options) {
  BuildOutcome out;
  ConstructionState state;
  try {
    state = initial_state(oracle, raw, policy, options);
  } catch (const Error& e) {
    out.failure = BuildFailure{e.kind(), 0, e.what()};
    return out;
  }

  const PropertyReport initial = verify_properties(state);
  if (const PropertyCheck* bad = initial.first_failure()) {
    std::ostringstream os;
    os << "property (" << bad->id << ") " << bad->name << " fails for x_1 = z_1: measured "
       << bad->measured;
    out.failure = BuildFailure{ErrorKind::kInvariantViolation, 1, os.str()};
    out.state = state;
    return out;
  }

  while (state.points.size() < options.n_points) {
    const std::size_t step = state.points.size() + 1;
    try {
      state = extend_one(state);
    } catch (const StepError& e) {
      out.failure = BuildFailure{e.kind(), step, e.what()};
      out.failed_step = e.log();
      out.state = state;
      return out;
    } catch (const Error& e) {
      out.failure = BuildFailure{e.kind(), step, e.what()};
      out.state = state;
      return out;
    }
  }

  EquilateralSet set;
  set.points = state.points;
  set.lambda = state.lambda;
  set.distances = distance_summary(oracle, state.points, state.lambda);
  set.defect = set.distances.defect;
  set.properties = verify_properties(state);
  if (!(set.defect <= options.final_tol)) {
    std::ostringstream os;
    os << "final defect " << set.defect << " exceeds final_tol " << options.final_tol;
    out.failure = BuildFailure{ErrorKind::kInvariantViolation, state.points.size(), os.str()};
    out.state = state;
    return out;
  }
  set.state = state;
  out.state = std::move(state);
  out.set = std::move(set);
  return out;
}

EquilateralSet build(const NormOracle& oracle, const SequenceSource& raw,
                     const TailPolicy& policy, const BuilderOptions& options) {
  BuildOutcome out = run_build(oracle, raw, policy, options);
  if (out.failure) {
    std::ostringstream os;
    os << "step " << out.failure->step << ": " << out.failure->message;
    throw Error(out.failure->kind, os.str());
  }
  return std::move(*out.set);
}

}  // namespace equilex
