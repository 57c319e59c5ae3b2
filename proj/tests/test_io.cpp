#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "fracgs/cli.hpp"
#include "fracgs/error.hpp"
#include "fracgs/io.hpp"

using namespace fracgs;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("fracgs_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

ErrorCode decode_error(const nlohmann::json& doc) {
  try {
    decode_state(doc);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kUsage;
}

}  // namespace

TEST_CASE("real state round trip is bit-exact") {
  const Grid g = make_grid(1, 12.0, 512);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> v(g.size());
  for (auto& x : v) x = n(rng) * std::pow(10.0, n(rng) * 5);
  const ModelParams p{1, 0.5, 6.0, -2.0};
  const auto text = dump_json(encode_state(Field::real(g, v), p));
  const StateData back = decode_state(nlohmann::json::parse(text));
  REQUIRE(back.field.is_real());
  CHECK(std::memcmp(back.field.values().data(), v.data(), v.size() * sizeof(double)) == 0);
  CHECK(back.params.lambda == p.lambda);
  CHECK(back.field.grid() == g);

  const fs::path file = scratch_dir() / "state.json";
  write_state(file, Field::real(g, v), p);
  const StateData from_disk = read_state(file);
  CHECK(std::memcmp(from_disk.field.values().data(), v.data(), v.size() * sizeof(double)) == 0);
  CHECK(read_file(file) == text);
}

TEST_CASE("complex state keeps re/im interleaving") {
  const Grid g = make_grid(1, 4.0, 8);
  std::vector<std::complex<double>> z(8);
  for (int i = 0; i < 8; ++i) z[i] = {0.1 * i, -1.0 / (i + 3)};
  const auto doc = encode_state(Field::complex(g, z), ModelParams{});
  CHECK(doc["kind"] == "complex");
  CHECK(doc["values"].size() == 16);
  CHECK(doc["values"][2].get<double>() == 0.1);
  CHECK(doc["values"][3].get<double>() == -0.25);
  const StateData back = decode_state(nlohmann::json::parse(dump_json(doc)));
  for (int i = 0; i < 8; ++i) CHECK(back.field.complex_values()[i] == z[i]);
}

TEST_CASE("state decoding errors") {
  const Grid g = make_grid(1, 4.0, 8);
  auto doc = encode_state(Field::real(g, std::vector<double>(8, 1.0)), ModelParams{});
  auto v2 = doc;
  v2["format_version"] = 2;
  CHECK(decode_error(v2) == ErrorCode::kVersionMismatch);
  auto short_doc = doc;
  short_doc["values"].erase(0);
  CHECK(decode_error(short_doc) == ErrorCode::kLengthMismatch);
  auto null_doc = doc;
  null_doc["values"][1] = nullptr;
  CHECK(decode_error(null_doc) == ErrorCode::kNonFinite);
  auto kind_doc = doc;
  kind_doc["kind"] = "quaternion";
  CHECK(decode_error(kind_doc) == ErrorCode::kTypeMismatch);

  std::vector<double> bad(8, 1.0);
  bad[3] = std::numeric_limits<double>::infinity();
  try {
    encode_state(Field::real(g, bad), ModelParams{});
    FAIL("expected non-finite error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonFinite);
  }
}

TEST_CASE("branch CSV layout") {
  MassCurve curve;
  const Stability labels[] = {Stability::kStable, Stability::kMarginal, Stability::kUnstable};
  for (int i = 0; i < 3; ++i) {
    BranchPoint p;
    p.lambda = 0.9 - i;
    p.mass = 0.1 * (i + 1);
    p.slope = 0.3 - 0.3 * i;
    p.stability = labels[i];
    p.min_abs_eig = 1.0 / 3.0;
    curve.points.push_back(p);
  }
  const std::string csv = branch_csv(curve);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "lambda,mass,action,kinetic,potential,power_q,pohozaev_rel,slope,stability,min_abs_eig");
  CHECK(lines[1].rfind("0.90000000000000002,0.10000000000000001,", 0) == 0);
  CHECK(lines[1].find(",stable,0.33333333333333331") != std::string::npos);
  CHECK(lines[2].find(",marginal,") != std::string::npos);
  CHECK(lines[3].find(",unstable,") != std::string::npos);
  CHECK(branch_csv(curve) == csv);

  const fs::path file = scratch_dir() / "branch.csv";
  emit_branch_csv(curve, file);
  CHECK(read_file(file) == csv);
  for (const auto& entry : fs::directory_iterator(file.parent_path())) {
    CHECK(entry.path().string().find(".tmp.") == std::string::npos);
  }
  CHECK_THROWS_AS(branch_csv(MassCurve{}), Error);
}

TEST_CASE("flat config parsing") {
  const std::vector<std::string> keys = {"model.s", "grid.M"};
  const auto map = parse_config("# comment\n\nmodel.s = 0.75\n  grid.M=256  \n", keys);
  CHECK(map.at("model.s") == "0.75");
  CHECK(map.at("grid.M") == "256");
  CHECK_THROWS_AS(parse_config("model.t = 1\n", keys), Error);
  CHECK_THROWS_AS(parse_config("model.s 1\n", keys), Error);
}

TEST_CASE("run config round-trips through the config format") {
  RunConfig cfg;
  cfg.s = 0.1 + 0.2;
  cfg.lambda = -1.0 / 3.0;
  cfg.points = 256;
  cfg.seed = 18446744073709551615ull;
  cfg.nonlinear = false;
  cfg.half_width = 7.25;
  const std::string text = format_config(to_config_map(cfg));
  RunConfig back;
  apply_config(back, parse_config(text, config_keys()));
  CHECK(back.s == cfg.s);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.points == 256);
  CHECK(back.seed == cfg.seed);
  CHECK_FALSE(back.nonlinear);
  CHECK(back.half_width == 7.25);
  CHECK(format_config(to_config_map(back)) == text);

  RunConfig bad;
  CHECK_THROWS_AS(apply_config(bad, {{"grid.M", "many"}}), Error);
  CHECK_THROWS_AS(apply_config(bad, {{"evolve.nonlinear", "maybe"}}), Error);
}

TEST_CASE("default half-width rule") {
  RunConfig cfg;
  CHECK(effective_half_width(cfg, -2.0) == 12.0);
  CHECK(effective_half_width(cfg, -40.0) == doctest::Approx(std::sqrt(5.0 * 42.0)));
  cfg.half_width = 9.0;
  CHECK(effective_half_width(cfg, -40.0) == 9.0);
}
