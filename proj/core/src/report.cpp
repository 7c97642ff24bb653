#include "equilex/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

namespace equilex {
namespace {

using Json = nlohmann::ordered_json;

void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        dump(v, out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; nested structures are expanded.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return !e.is_structured();
      });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump(v, out, indent + 2);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

Json real(double v) { return Json(static_cast<double>(v)); }

Json reals(const std::vector<double>& v) {
  Json a = Json::array();
  for (double d : v) a.push_back(real(d));
  return a;
}

Json point_json(const Point& p) { return reals(p.vector()); }

Json config_json(const RunConfig& c) {
  Json j;
  j["space"] = {{"kind", c.space_kind}, {"p", real(c.space_p)}, {"dim", c.space_dim}};
  j["sequence"] = {{"kind", c.sequence_kind},
                   {"beta", real(c.sequence_beta)},
                   {"block", c.sequence_block},
                   {"profile", to_string(c.sequence_profile)}};
  j["builder"] = {{"n_points", c.n_points},       {"prop_tol", real(c.prop_tol)},
                  {"final_tol", real(c.final_tol)}, {"delta_cap", real(c.delta_cap)},
                  {"k_retries", c.k_retries},     {"gate", to_string(c.gate)},
                  {"eps_scale", real(c.eps_scale)}};
  j["tail"] = {{"start", c.effective_tail_start()},
               {"window", c.tail_window},
               {"tol", real(c.tail_tol)}};
  j["newton"] = {{"max_iter", c.newton_max_iter},
                 {"res_tol", real(c.newton_res_tol)},
                 {"guard_samples", c.newton_guard_samples}};
  j["seed"] = c.seed;
  return j;
}

Json certificate_json(const GuardCertificate& g) {
  return Json{{"radius", real(g.radius)},
              {"passes", g.passes()},
              {"precondition_ok", g.precondition_ok},
              {"max_id_deviation", real(g.max_id_deviation)},
              {"max_taylor_ratio", real(g.max_taylor_ratio)},
              {"max_fd_error", real(g.max_fd_error)},
              {"sample_count", g.sample_count}};
}

Json step_json(const StepLog& s) {
  Json failures = Json::array();
  for (const auto& f : s.failures) {
    failures.push_back({{"K", f.K}, {"kind", std::string(to_string(f.kind))}, {"message", f.message}});
  }
  Json trace = Json::array();
  for (const auto& t : s.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"residual", real(t.residual)},
                     {"g_residual", real(t.g_residual)},
                     {"step_norm", real(t.step_norm)},
                     {"decay", real(t.decay)}});
  }
  Json j;
  j["step"] = s.step;
  j["K"] = s.K;
  j["gate_skips"] = s.gate_skips;
  j["failures"] = failures;
  j["gate"] = {{"in_class", s.gate.in_class},
               {"contraction", real(s.gate.contraction)},
               {"inverse_norm", real(s.gate.inverse_norm)},
               {"inverse_bound", real(s.gate.inverse_bound)}};
  j["delta"] = real(s.delta);
  j["newton"] = {{"iterations", s.newton_iterations},
                 {"max_decay", real(s.max_decay)},
                 {"guard_halvings", s.guard_halvings},
                 {"certificate", certificate_json(s.certificate)},
                 {"trace", trace}};
  j["solution_norm"] = real(s.solution_norm);
  return j;
}

Json schedule_json(const EpsSchedule& s) {
  return Json{{"C", real(s.C)}, {"n_max", s.n_max}, {"eps", reals(s.eps)}, {"R", reals(s.R)}};
}

double plain_norm(const std::string& kind, double p, const std::vector<double>& x) {
  double s2 = 0.0;
  double sp = 0.0;
  for (double v : x) {
    s2 += v * v;
    sp += std::pow(std::abs(v), p);
  }
  const double l2 = std::sqrt(s2);
  const double lp = p == 2.0 ? l2 : std::pow(sp, 1.0 / p);
  return kind == "lp" ? lp : 0.5 * (l2 + lp);
}

}  // namespace

std::string make_report(const RunConfig& config, const BuildOutcome& outcome) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = outcome.ok() ? "ok" : "failed";
  j["config"] = config_json(config);

  const ConstructionState* state = outcome.ok() ? &outcome.set->state
                                   : outcome.state ? &*outcome.state
                                                   : nullptr;
  if (state) {
    j["lambda"] = real(state->lambda);
    j["C"] = real(state->C);
    j["stabilization"] = {{"differenced", state->stab.differenced},
                          {"scalars", reals(state->stab.scalars)},
                          {"functional_limits", reals(state->stab.functional_limits)},
                          {"residual_limits", reals(state->stab.residual_limits)}};
    Json pts = Json::array();
    for (const Point& p : state->points) pts.push_back(point_json(p));
    j["points"] = pts;
    const DistanceSummary d = distance_summary(state->oracle, state->points, state->lambda);
    Json rows = Json::array();
    for (const auto& r : d.matrix) rows.push_back(reals(r));
    j["distance_matrix"] = rows;
    j["defect"] = real(d.defect);

    Json props = Json::array();
    for (const auto& c : verify_properties(*state).checks) {
      props.push_back({{"id", c.id},
                       {"name", c.name},
                       {"vacuous", c.vacuous},
                       {"passed", c.passed},
                       {"measured", real(c.measured)},
                       {"bound", real(c.bound)},
                       {"slack", real(c.slack)}});
    }
    j["property_slacks"] = props;
    Json sched = schedule_json(state->sched);
    sched["gate_mode"] = to_string(state->options.gate);
    sched["gate_eps"] = reals(state->gate_sched.eps);
    j["eps_schedule"] = sched;
    Json steps = Json::array();
    for (const auto& s : state->logs) steps.push_back(step_json(s));
    j["steps"] = steps;
  } else {
    j["lambda"] = nullptr;
    j["points"] = Json::array();
  }

  if (outcome.failure) {
    Json err = {{"kind", std::string(to_string(outcome.failure->kind))},
                {"step", outcome.failure->step},
                {"message", outcome.failure->message}};
    if (outcome.failed_step) err["step_log"] = step_json(*outcome.failed_step);
    j["error"] = err;
  } else {
    j["error"] = nullptr;
  }

  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot move report into '" + path + "'");
  }
}

int emit_report(const RunConfig& config, const BuildOutcome& outcome, const std::string& path) {
  try {
    write_atomically(path, make_report(config, outcome));
  } catch (const Error&) {
    return kExitUsage;
  }
  return outcome.ok() ? kExitOk : kExitFailure;
}

VerifyResult verify_points(const std::string& report_path, double tol) {
  VerifyResult r;
  std::ifstream in(report_path);
  if (!in) {
    r.message = "cannot open report '" + report_path + "'";
    return r;
  }
  try {
    const Json j = Json::parse(in);
    const Json& space = j.at("config").at("space");
    const std::string kind = space.at("kind").get<std::string>();
    const double p = space.at("p").get<double>();
    if (kind != "lp" && kind != "custom-smooth") {
      r.message = "unknown space kind '" + kind + "'";
      return r;
    }
    if (j.at("lambda").is_null()) {
      r.message = "report declares no lambda";
      return r;
    }
    r.lambda = j.at("lambda").get<double>();
    std::vector<std::vector<double>> pts;
    for (const auto& row : j.at("points")) pts.push_back(row.get<std::vector<double>>());
    r.points = pts.size();
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        if (pts[a].size() != pts[b].size()) {
          r.message = "points have different lengths";
          r.exit_code = kExitUsage;
          return r;
        }
        std::vector<double> diff(pts[a].size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = pts[a][i] - pts[b][i];
        r.defect = std::max(r.defect, std::abs(plain_norm(kind, p, diff) - r.lambda));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    r.message = std::string("malformed report: ") + e.what();
    r.exit_code = kExitUsage;
    return r;
  }
  std::ostringstream os;
  os << r.points << " points, lambda " << r.lambda << ", defect " << r.defect;
  if (r.defect <= tol) {
    r.exit_code = kExitOk;
    os << " <= tol " << tol;
  } else {
    r.exit_code = kExitFailure;
    os << " > tol " << tol;
  }
  r.message = os.str();
  return r;
}

}  // namespace equilex
