#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace tentanav;

namespace {

std::string default_text()
{
  std::ifstream in(std::string(TENTANAV_SOURCE_DIR) + "/configs/default.json");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json default_json() { return nlohmann::json::parse(default_text()); }

std::string error_of(const nlohmann::json& j)
{
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Params, ThresholdsFromTheFieldTrialsAreAccepted)
{
  auto j = default_json();
  j["offline"]["tau_P"] = 0.4;
  j["offline"]["tau_S"] = 1.0;
  const Config c = parse_config(j);
  EXPECT_DOUBLE_EQ(c.offline.tau_priority, 0.4);
  EXPECT_DOUBLE_EQ(c.offline.tau_support, 1.0);
}

TEST(Params, InvertedThresholdsAreRejected)
{
  auto j = default_json();
  j["offline"]["tau_P"] = 1.0;
  j["offline"]["tau_S"] = 0.4;
  EXPECT_EQ(error_of(j), "tau_S must exceed tau_P");
}

TEST(Params, OmittedWeightsFallBackToDefaults)
{
  auto j = default_json();
  j.erase("online");
  const Config c = parse_config(j);
  const OnlineParams d;
  EXPECT_EQ(c.online.lambda_clear, d.lambda_clear);
  EXPECT_EQ(c.online.lambda_clut, d.lambda_clut);
  EXPECT_EQ(c.online.lambda_close, d.lambda_close);
  EXPECT_EQ(c.online.lambda_smo, d.lambda_smo);
  EXPECT_EQ(c.online.alpha_crash, d.alpha_crash);
}

TEST(Params, ShippedConfigMatchesCompiledDefaults)
{
  const Config file = fixtures::default_config();
  const Config built;
  EXPECT_EQ(to_json(file), to_json(built));
}

TEST(Params, SameBytesSameValues)
{
  const std::string text = default_text();
  EXPECT_EQ(to_json(parse_config(text)), to_json(parse_config(text)));
}

TEST(Params, JsonRoundTrip)
{
  Config c;
  c.online.lambda_smo = 0.125;
  c.sensor.noise_sigma = 0.01;
  EXPECT_EQ(to_json(parse_config(to_json(c))), to_json(c));
}

TEST(Params, MissingRequiredField)
{
  auto j = default_json();
  j["offline"].erase("voxel_dim");
  EXPECT_EQ(error_of(j), "missing field offline.voxel_dim");
  j = default_json();
  j.erase("robot");
  EXPECT_EQ(error_of(j), "missing object 'robot'");
}

TEST(Params, WrongTypeAndSyntaxErrors)
{
  auto j = default_json();
  j["offline"]["n_yaw"] = "many";
  EXPECT_EQ(error_of(j), "wrong type for field offline.n_yaw");
  EXPECT_THROW(parse_config(std::string("{\"robot\": ")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Params, InvariantViolations)
{
  struct Case {
    const char* group;
    const char* key;
    nlohmann::json value;
  };
  const std::vector<Case> cases{
      {"online", "alpha_crash", 1.0},      {"online", "lambda_clut", -1.0},
      {"online", "history_depth", 0},      {"offline", "voxel_dim", 0.0},
      {"offline", "grid_counts", {0, 1, 1}}, {"offline", "tentacle_length", 20.0},
      {"robot", "v_lat", 0.0},             {"offline", "alpha_beta", 2.0},
  };
  for (const auto& c : cases) {
    auto j = default_json();
    j[c.group][c.key] = c.value;
    EXPECT_THROW(parse_config(j), ConfigError) << c.group << "." << c.key;
  }

  auto j = default_json();
  for (const char* k : {"lambda_clear", "lambda_clut", "lambda_close", "lambda_smo"})
    j["online"][k] = 0.0;
  EXPECT_EQ(error_of(j), "at least one lambda weight must be positive");
}

TEST(Params, SupportWeightsStayBelowMaximum)
{
  // Every accepted offline group keeps beta_max / (alpha_beta * d) < beta_max
  // for d >= tau_P.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int i = 0; i < 1000; ++i) {
    OfflineParams p;
    p.tau_priority = u(rng);
    p.tau_support = p.tau_priority + u(rng);
    p.alpha_beta = u(rng) * 4;
    try {
      validate(p);
    } catch (const ConfigError&) {
      continue;
    }
    EXPECT_LT(p.beta_max / (p.alpha_beta * p.tau_priority), p.beta_max);
  }
}
