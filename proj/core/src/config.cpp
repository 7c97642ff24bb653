#include "equilex/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "equilex/errors.hpp"

namespace equilex {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(std::size_t line, const std::string& key, const std::string& why) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  if (!key.empty()) os << "key '" << key << "': ";
  os << why;
  throw Error(ErrorKind::kConfig, os.str());
}

double parse_real(const std::string& v, std::size_t line, const std::string& key) {
  const std::string lower = [&] {
    std::string s = v;
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }();
  if (lower == "inf" || lower == "infinity" || lower == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) fail(line, key, "not a real number: '" + v + "'");
  return d;
}

std::uint64_t parse_unsigned(const std::string& v, std::size_t line, const std::string& key) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    fail(line, key, "not a non-negative integer: '" + v + "'");
  }
  errno = 0;
  const unsigned long long u = std::strtoull(v.c_str(), nullptr, 10);
  if (errno == ERANGE) fail(line, key, "integer out of range: '" + v + "'");
  return u;
}

using Setter = std::function<void(RunConfig&, const std::string&, std::size_t, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  auto real = [](double RunConfig::*field) -> Setter {
    return [field](RunConfig& c, const std::string& v, std::size_t line, const std::string& k) {
      c.*field = parse_real(v, line, k);
    };
  };
  auto count = [](std::size_t RunConfig::*field) -> Setter {
    return [field](RunConfig& c, const std::string& v, std::size_t line, const std::string& k) {
      c.*field = static_cast<std::size_t>(parse_unsigned(v, line, k));
    };
  };
  auto text = [](std::string RunConfig::*field) -> Setter {
    return [field](RunConfig& c, const std::string& v, std::size_t, const std::string&) {
      c.*field = v;
    };
  };
  static const std::map<std::string, Setter> table = {
      {"space.kind", text(&RunConfig::space_kind)},
      {"space.p", real(&RunConfig::space_p)},
      {"space.dim", count(&RunConfig::space_dim)},
      {"sequence.kind", text(&RunConfig::sequence_kind)},
      {"sequence.beta", real(&RunConfig::sequence_beta)},
      {"sequence.block", count(&RunConfig::sequence_block)},
      {"sequence.profile",
       [](RunConfig& c, const std::string& v, std::size_t line, const std::string& k) {
         try {
           c.sequence_profile = parse_block_profile(v);
         } catch (const Error& e) {
           fail(line, k, e.what());
         }
       }},
      {"builder.n_points", count(&RunConfig::n_points)},
      {"builder.prop_tol", real(&RunConfig::prop_tol)},
      {"builder.final_tol", real(&RunConfig::final_tol)},
      {"builder.delta_cap", real(&RunConfig::delta_cap)},
      {"builder.k_retries", count(&RunConfig::k_retries)},
      {"builder.gate",
       [](RunConfig& c, const std::string& v, std::size_t line, const std::string& k) {
         try {
           c.gate = parse_gate_mode(v);
         } catch (const Error& e) {
           fail(line, k, e.what());
         }
       }},
      {"builder.eps_scale", real(&RunConfig::eps_scale)},
      {"tail.start",
       [](RunConfig& c, const std::string& v, std::size_t line, const std::string& k) {
         c.tail_start = static_cast<std::size_t>(parse_unsigned(v, line, k));
       }},
      {"tail.window", count(&RunConfig::tail_window)},
      {"tail.tol", real(&RunConfig::tail_tol)},
      {"newton.max_iter", count(&RunConfig::newton_max_iter)},
      {"newton.res_tol", real(&RunConfig::newton_res_tol)},
      {"newton.guard_samples", count(&RunConfig::newton_guard_samples)},
      {"seed",
       [](RunConfig& c, const std::string& v, std::size_t line, const std::string& k) {
         c.seed = parse_unsigned(v, line, k);
       }},
      {"output.path", text(&RunConfig::output_path)},
  };
  return table;
}

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(0, key, "must be a positive finite real");
}

}  // namespace

std::size_t RunConfig::minimum_dim() const {
  const std::size_t start = effective_tail_start();
  // Both tail windows must exist: max_index >= start + 2·window − 1.
  const std::size_t by_invariant = 2 * n_points + start + tail_window;
  std::size_t by_windows = start + 2 * tail_window;
  if (sequence_kind == "block") by_windows = (start + 2 * tail_window - 1) * sequence_block + 1;
  return std::max(by_invariant, by_windows);
}

void validate(const RunConfig& c) {
  if (c.space_kind != "lp" && c.space_kind != "custom-smooth") {
    fail(0, "space.kind", "expected lp or custom-smooth, got '" + c.space_kind + "'");
  }
  if (!(c.space_p > 1.0) || std::isinf(c.space_p)) {
    fail(0, "space.p", "p = " + format_real(c.space_p) + " is not uniformly smooth");
  }
  if (c.space_p < kMinExponent || c.space_p > kMaxExponent) {
    fail(0, "space.p", "p = " + format_real(c.space_p) + " outside supported range [" +
                           format_real(kMinExponent) + ", " + format_real(kMaxExponent) + "]");
  }
  if (c.space_dim < 1) fail(0, "space.dim", "must be positive");

  if (c.sequence_kind == "perturbed-basis") {
    if (!(c.sequence_beta > 0.0 && c.sequence_beta < 1.0)) {
      fail(0, "sequence.beta", "must lie in (0, 1)");
    }
  } else if (c.sequence_kind == "block") {
    if (c.sequence_block < 1) fail(0, "sequence.block", "must be at least 1");
  } else if (c.sequence_kind != "unit-basis") {
    fail(0, "sequence.kind",
         "expected unit-basis, perturbed-basis or block, got '" + c.sequence_kind + "'");
  }

  if (c.n_points < 1) fail(0, "builder.n_points", "must be at least 1");
  require_positive(c.prop_tol, "builder.prop_tol");
  require_positive(c.final_tol, "builder.final_tol");
  require_positive(c.delta_cap, "builder.delta_cap");
  if (!(c.eps_scale > 0.0 && c.eps_scale < 1.0)) fail(0, "builder.eps_scale", "must lie in (0, 1)");
  if (c.effective_tail_start() < 2) fail(0, "tail.start", "must be at least 2");
  if (c.tail_window < 3) fail(0, "tail.window", "must be at least 3");
  require_positive(c.tail_tol, "tail.tol");
  if (c.newton_max_iter < 1) fail(0, "newton.max_iter", "must be at least 1");
  require_positive(c.newton_res_tol, "newton.res_tol");
  if (c.newton_guard_samples < 1) fail(0, "newton.guard_samples", "must be at least 1");
  if (c.output_path.empty()) fail(0, "output.path", "must not be empty");

  const std::size_t min_dim = c.minimum_dim();
  if (c.space_dim < min_dim) {
    std::ostringstream os;
    os << "space.dim = " << c.space_dim << " is below the required minimum " << min_dim
       << " (2*n_points + tail.start + tail.window = " << 2 * c.n_points << " + "
       << c.effective_tail_start() << " + " << c.tail_window
       << ", and both tail windows must fit in the sequence)";
    fail(0, "space.dim", os.str());
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto sep = body.find_first_of("=:");
    if (sep == std::string::npos) fail(line, "", "expected 'key = value', got '" + body + "'");
    const std::string key = trim(body.substr(0, sep));
    const std::string value = trim(body.substr(sep + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) fail(line, key, "unknown key");
    if (auto [pos, inserted] = seen.emplace(key, line); !inserted) {
      fail(line, key, "duplicate key (first set on line " + std::to_string(pos->second) + ")");
    }
    if (value.empty()) fail(line, key, "missing value");
    it->second(c, value, line, key);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "space.kind = " << c.space_kind << "\n"
     << "space.p = " << format_real(c.space_p) << "\n"
     << "space.dim = " << c.space_dim << "\n"
     << "sequence.kind = " << c.sequence_kind << "\n"
     << "sequence.beta = " << format_real(c.sequence_beta) << "\n"
     << "sequence.block = " << c.sequence_block << "\n"
     << "sequence.profile = " << to_string(c.sequence_profile) << "\n"
     << "builder.n_points = " << c.n_points << "\n"
     << "builder.prop_tol = " << format_real(c.prop_tol) << "\n"
     << "builder.final_tol = " << format_real(c.final_tol) << "\n"
     << "builder.delta_cap = " << format_real(c.delta_cap) << "\n"
     << "builder.k_retries = " << c.k_retries << "\n"
     << "builder.gate = " << to_string(c.gate) << "\n"
     << "builder.eps_scale = " << format_real(c.eps_scale) << "\n";
  if (c.tail_start) os << "tail.start = " << *c.tail_start << "\n";
  os << "tail.window = " << c.tail_window << "\n"
     << "tail.tol = " << format_real(c.tail_tol) << "\n"
     << "newton.max_iter = " << c.newton_max_iter << "\n"
     << "newton.res_tol = " << format_real(c.newton_res_tol) << "\n"
     << "newton.guard_samples = " << c.newton_guard_samples << "\n"
     << "seed = " << c.seed << "\n"
     << "output.path = " << c.output_path << "\n";
  return os.str();
}

NormOracle make_oracle(const RunConfig& c) {
  if (c.space_kind == "lp") return NormOracle::lp(c.space_p, c.space_dim);
  return NormOracle::blended(c.space_p, c.space_dim);
}

SequenceSource make_source(const RunConfig& c) {
  if (c.sequence_kind == "perturbed-basis") {
    return SequenceSource::perturbed_basis(c.space_dim, c.sequence_beta);
  }
  if (c.sequence_kind == "block") {
    return SequenceSource::block(c.space_dim, c.sequence_block, c.sequence_profile);
  }
  return SequenceSource::unit_basis(c.space_dim);
}

TailPolicy make_policy(const RunConfig& c) {
  return TailPolicy{c.effective_tail_start(), c.tail_window, c.tail_tol};
}

BuilderOptions make_builder_options(const RunConfig& c) {
  BuilderOptions o;
  o.n_points = c.n_points;
  o.prop_tol = c.prop_tol;
  o.final_tol = c.final_tol;
  o.delta_cap = c.delta_cap;
  o.k_retries = c.k_retries;
  o.gate = c.gate;
  o.eps_scale = c.eps_scale;
  o.newton.max_iter = c.newton_max_iter;
  o.newton.res_tol = c.newton_res_tol;
  o.newton.guard_samples = c.newton_guard_samples;
  o.newton.seed = c.seed;
  return o;
}

}  // namespace equilex
