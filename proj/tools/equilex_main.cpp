// Command line front end: build, verify, modulus and matrix-gate.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "equilex/builder.hpp"
#include "equilex/config.hpp"
#include "equilex/errors.hpp"
#include "equilex/extended_norm.hpp"
#include "equilex/matrix_gate.hpp"
#include "equilex/norm_oracle.hpp"
#include "equilex/report.hpp"

namespace {

using namespace equilex;

constexpr const char* kSeedEnv = "EQUILEX_SEED";

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv(kSeedEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  const std::string s(v);
  if (s.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorKind::kConfig, std::string(kSeedEnv) + " must be a non-negative integer");
  }
  return std::stoull(s);
}

// flag > environment > config file.
void apply_seed(RunConfig& config, const std::optional<std::uint64_t>& flag) {
  if (flag) {
    config.seed = *flag;
  } else if (const auto env = env_seed()) {
    config.seed = *env;
  }
}

int run_build_command(const std::string& config_path, const std::string& out,
                      const std::optional<std::uint64_t>& seed) {
  RunConfig config;
  try {
    config = load_config(config_path);
    apply_seed(config, seed);
  } catch (const Error& e) {
    std::cerr << "equilex: " << e.what() << "\n";
    return kExitUsage;
  }
  const std::string path = out.empty() ? config.output_path : out;
  const BuildOutcome outcome = run_build(make_oracle(config), make_source(config),
                                         make_policy(config), make_builder_options(config));
  const int code = emit_report(config, outcome, path);
  if (code == kExitUsage) {
    std::cerr << "equilex: cannot write report to '" << path << "'\n";
    return code;
  }
  if (outcome.ok()) {
    std::printf("status ok: %zu points, lambda %.17g, defect %.3g -> %s\n",
                outcome.set->points.size(), outcome.set->lambda, outcome.set->defect,
                path.c_str());
  } else {
    std::printf("status failed at step %zu (%s): %s -> %s\n", outcome.failure->step,
                std::string(to_string(outcome.failure->kind)).c_str(),
                outcome.failure->message.c_str(), path.c_str());
  }
  return code;
}

int run_verify_command(const std::string& report, double tol) {
  const VerifyResult r = verify_points(report, tol);
  (r.exit_code == kExitOk ? std::cout : std::cerr) << r.message << "\n";
  return r.exit_code;
}

int run_modulus_command(const std::string& config_path, const std::vector<double>& taus,
                        std::size_t samples, const std::optional<std::uint64_t>& seed) {
  try {
    RunConfig config = load_config(config_path);
    apply_seed(config, seed);
    const NormOracle oracle = make_oracle(config);
    const SequenceSource source = make_source(config);
    const TailPolicy policy = make_policy(config);
    std::printf("%-12s %-24s %-24s %-24s\n", "tau", "base", "extended", "mapped_base");
    for (double tau : taus) {
      const double base = modulus_of_smoothness(oracle, tau, samples, config.seed);
      const ExtendedModulus ext =
          extended_modulus_of_smoothness(oracle, source, policy, tau, samples, config.seed);
      std::printf("%-12.6g %-24.17g %-24.17g %-24.17g\n", tau, base, ext.extended,
                  ext.mapped_base);
    }
  } catch (const Error& e) {
    std::cerr << "equilex: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int run_matrix_gate_command(double c, std::size_t n_max, std::size_t samples,
                            std::uint64_t seed) {
  EpsSchedule sched;
  try {
    sched = eps_schedule(c, n_max);
  } catch (const Error& e) {
    std::cerr << "equilex: " << e.what() << "\n";
    return kExitUsage;
  }
  std::printf("C = %.17g, N_max = %zu\n", sched.C, sched.n_max);
  std::printf("%-4s %-24s %-24s\n", "j", "eps_j", "R_j");
  for (std::size_t j = 1; j <= n_max; ++j) {
    if (j == 1) {
      std::printf("%-4zu %-24s %-24.17g\n", j, "-", sched.R_at(j));
    } else {
      std::printf("%-4zu %-24.17g %-24.17g\n", j, sched.eps_at(j), sched.R_at(j));
    }
  }
  std::printf("\n%-4s %-8s %-9s %-24s %-24s\n", "N", "samples", "failures", "max |A^-1|",
              "R_N");
  std::size_t failures = 0;
  for (const auto& row : verify_schedule(sched, samples, seed)) {
    std::printf("%-4zu %-8zu %-9zu %-24.17g %-24.17g\n", row.n, row.samples, row.failures,
                row.max_measured, row.bound);
    failures += row.failures;
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilateral sets in finite sections of smooth normed spaces"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "Run a construction and write a JSON report");
  std::string build_config;
  std::string build_out;
  std::optional<std::uint64_t> build_seed;
  build->add_option("config", build_config, "Run configuration file")->required();
  build->add_option("--out", build_out, "Report path (overrides output.path)");
  build->add_option("--seed", build_seed, "Seed (overrides EQUILEX_SEED and the config)");

  auto* verify = app.add_subcommand("verify", "Recompute pairwise distances of a report");
  std::string verify_report;
  double verify_tol = 1e-8;
  verify->add_option("report", verify_report, "Report file")->required();
  verify->add_option("--tol", verify_tol, "Accepted defect")->capture_default_str();

  auto* modulus = app.add_subcommand("modulus", "Sampled moduli of smoothness");
  std::string modulus_config;
  std::vector<double> taus;
  std::size_t modulus_samples = 100000;
  std::optional<std::uint64_t> modulus_seed;
  modulus->add_option("config", modulus_config, "Run configuration file")->required();
  modulus->add_option("--tau", taus, "One or more tau values")->required();
  modulus->add_option("--samples", modulus_samples, "Sample pairs")->capture_default_str();
  modulus->add_option("--seed", modulus_seed, "Seed (overrides EQUILEX_SEED and the config)");

  auto* gate = app.add_subcommand("matrix-gate", "Print and sample-check an eps schedule");
  double gate_c = 0.0;
  std::size_t gate_n = 0;
  std::size_t gate_samples = 1000;
  std::uint64_t gate_seed = 0;
  gate->add_option("--c", gate_c, "Diagonal bound C in (0, 1)")->required();
  gate->add_option("--n-max", gate_n, "Schedule horizon N_max")->required();
  gate->add_option("--samples", gate_samples, "Samples per N")->capture_default_str();
  gate->add_option("--seed", gate_seed, "Sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*build) return run_build_command(build_config, build_out, build_seed);
  if (*verify) return run_verify_command(verify_report, verify_tol);
  if (*modulus) return run_modulus_command(modulus_config, taus, modulus_samples, modulus_seed);
  return run_matrix_gate_command(gate_c, gate_n, gate_samples, gate_seed);
}
