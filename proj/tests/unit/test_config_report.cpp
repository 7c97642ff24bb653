#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "equilex/config.hpp"
#include "equilex/errors.hpp"
#include "equilex/report.hpp"

using namespace equilex;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  const fs::path dir = fs::path(EQUILEX_TEST_TMPDIR) / "config_report";
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "config accepted: " << text;
  return {};
}

BuildOutcome run(const RunConfig& c) {
  return run_build(make_oracle(c), make_source(c), make_policy(c), make_builder_options(c));
}

const char* kPerturbed =
    "space.kind = lp\nspace.p = 2\nspace.dim = 64\nsequence.kind = perturbed-basis\n"
    "sequence.beta = 0.5\ntail.start = 40\nseed = 1\n";

}  // namespace

TEST(Config, MinimalTextUsesDefaults) {
  const RunConfig c = parse_config("space.p = 2\n");
  EXPECT_EQ(c, RunConfig{});
  EXPECT_EQ(c.effective_tail_start(), 24u);
  EXPECT_EQ(c.minimum_dim(), 45u);
}

TEST(Config, AcceptsColonsAndComments) {
  const RunConfig c = parse_config("# header\nspace.p: 3   # trailing\n\nbuilder.n_points = 4\n");
  EXPECT_EQ(c.space_p, 3.0);
  EXPECT_EQ(c.n_points, 4u);
}

TEST(Config, RejectsNonUniformlySmoothExponents) {
  EXPECT_NE(config_error("space.p = 1\n").find("not uniformly smooth"), std::string::npos);
  EXPECT_NE(config_error("space.p = inf\n").find("not uniformly smooth"), std::string::npos);
  EXPECT_NE(config_error("space.p = 1.001\n").find("space.p"), std::string::npos);
}

TEST(Config, DimensionBelowMinimumNamesTheMinimum) {
  const std::string msg = config_error("space.dim = 30\nbuilder.n_points = 8\n");
  EXPECT_NE(msg.find("45"), std::string::npos) << msg;
  EXPECT_NE(msg.find("space.dim"), std::string::npos) << msg;
}

TEST(Config, UnknownDuplicateAndMalformedLinesRejected) {
  EXPECT_NE(config_error("space.q = 2\n").find("space.q"), std::string::npos);
  EXPECT_NE(config_error("space.p = 2\nspace.p = 3\n").find("space.p"), std::string::npos);
  config_error("space.p 2\n");
  config_error("space.dim = -4\n");
  config_error("sequence.kind = perturbed-basis\nsequence.beta = 1.5\n");
  config_error("builder.gate = loose\n");
}

TEST(Config, SerializeRoundTripIsExact) {
  RunConfig c;
  c.space_p = 2.0 / 3.0 + 1.0;
  c.sequence_kind = "block";
  c.sequence_block = 3;
  c.sequence_profile = BlockProfile::kGeometric;
  c.n_points = 5;
  c.tail_start = 30;
  c.space_dim = 200;
  c.eps_scale = 0.1 / 3.0;
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  c.output_path = "out dir/r.json";
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  EXPECT_EQ(parse_config(serialize_config(RunConfig{})), RunConfig{});
}

TEST(Config, LoadReportsMissingFile) {
  try {
    load_config(tmp_path("does_not_exist.conf"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Report, ContainsDeclaredFieldsAndVerifies) {
  const RunConfig c = parse_config(kPerturbed);
  const BuildOutcome out = run(c);
  ASSERT_TRUE(out.ok()) << out.failure->message;
  const std::string path = tmp_path("perturbed.json");
  EXPECT_EQ(emit_report(c, out, path), kExitOk);

  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_EQ(j.at("points").size(), 8u);
  EXPECT_EQ(j.at("points")[0].size(), 64u);
  EXPECT_EQ(j.at("distance_matrix").size(), 8u);
  EXPECT_EQ(j.at("property_slacks").size(), 6u);
  EXPECT_EQ(j.at("steps").size(), 7u);
  EXPECT_NEAR(j.at("lambda").get<double>(), std::sqrt(2.0), 1e-12);
  EXPECT_LE(j.at("defect").get<double>(), 1e-8);
  EXPECT_TRUE(j.at("error").is_null());
  for (const char* key : {"config", "C", "stabilization", "eps_schedule"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }

  const VerifyResult v = verify_points(path, 1e-8);
  EXPECT_EQ(v.exit_code, kExitOk) << v.message;
  EXPECT_EQ(v.points, 8u);
}

TEST(Report, RerunsAreByteIdentical) {
  const RunConfig c = parse_config(kPerturbed);
  const std::string a = make_report(c, run(c));
  const std::string b = make_report(c, run(c));
  EXPECT_EQ(a, b);
}

TEST(Report, VerifyFlagsPerturbedCoordinate) {
  const RunConfig c = parse_config(kPerturbed);
  const std::string path = tmp_path("tampered.json");
  ASSERT_EQ(emit_report(c, run(c), path), kExitOk);
  auto j = nlohmann::json::parse(slurp(path));
  j["points"][3][5] = j["points"][3][5].get<double>() + 1e-3;
  write_atomically(path, j.dump());
  const VerifyResult v = verify_points(path, 1e-8);
  EXPECT_EQ(v.exit_code, kExitFailure);
  EXPECT_GT(v.defect, 1e-8);
}

TEST(Report, VerifyRejectsUnreadableInput) {
  EXPECT_EQ(verify_points(tmp_path("absent.json"), 1e-8).exit_code, kExitUsage);
  const std::string path = tmp_path("garbage.json");
  write_atomically(path, "{not json");
  EXPECT_EQ(verify_points(path, 1e-8).exit_code, kExitUsage);
}

TEST(Report, LpThreeUnitBasisHasCubeRootLambda) {
  const RunConfig c = parse_config("space.p = 3\nspace.dim = 64\n");
  const BuildOutcome out = run(c);
  ASSERT_TRUE(out.ok());
  const std::string path = tmp_path("l3.json");
  ASSERT_EQ(emit_report(c, out, path), kExitOk);
  const VerifyResult v = verify_points(path, 1e-8);
  EXPECT_EQ(v.exit_code, kExitOk);
  EXPECT_NEAR(v.lambda, std::cbrt(2.0), 1e-15);
}

TEST(Report, FailureCarriesErrorAndExitCode) {
  RunConfig c = parse_config(kPerturbed);
  c.gate = GateMode::kSchedule;
  const BuildOutcome out = run(c);
  ASSERT_FALSE(out.ok());
  const std::string path = tmp_path("failed.json");
  EXPECT_EQ(emit_report(c, out, path), kExitFailure);
  const auto j = nlohmann::json::parse(slurp(path));
  EXPECT_EQ(j.at("status"), "failed");
  EXPECT_EQ(j.at("error").at("kind"), "ExhaustedPool");
}

TEST(Report, UnwritablePathIsUsageError) {
  const RunConfig c = parse_config("space.p = 2\nbuilder.n_points = 2\n");
  EXPECT_EQ(emit_report(c, run(c), tmp_path("no/such/dir/r.json")), kExitUsage);
}
