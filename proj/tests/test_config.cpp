#include "doctest.h"

#include <string>

#include "neulap/config.hpp"
#include "neulap/errors.hpp"
#include "oracles.hpp"

using namespace neulap;
using cli::parse_config;

TEST_SUITE("config") {

TEST_CASE("minimal config fills every default") {
  const auto cfg = parse_config("[experiment]\ntype = tau-sweep\n");
  CHECK(cfg.experiment == cli::ExperimentKind::TauSweep);
  CHECK(cfg.family == "gamma-poly");
  REQUIRE(cfg.coeffs.size() == 3);
  CHECK(cfg.coeffs[0] == doctest::Approx(0.3));
  CHECK(cfg.coeffs[2] == doctest::Approx(0.2));
  CHECK(cfg.L == doctest::Approx(1.0));
  CHECK(cfg.N == 2);
  REQUIRE(cfg.epsilon_grid.size() == 5);
  CHECK(cfg.epsilon_grid.front() == doctest::Approx(0.5));
  CHECK(cfg.epsilon_grid.back() == doctest::Approx(0.125));
  CHECK(cfg.nx == 64);
  CHECK(cfg.ny == 64);
  CHECK(cfg.h_base == doctest::Approx(1.0 / 64.0));
  CHECK(cfg.height == doctest::Approx(0.83));
  CHECK(cfg.k == 6);
  CHECK(cfg.tol == doctest::Approx(1e-8));
  CHECK(cfg.max_iter == 500);
  CHECK(cfg.block_size == 0);
  CHECK(cfg.seed == 12345);
  CHECK(cfg.kappa == doctest::Approx(0.6));
  CHECK(cfg.output_path == "out");
}

TEST_CASE("full roundtrip of every key") {
  const char* text =
      "[experiment]\n"
      "type = bracketing-check\n"
      "[profile]\n"
      "family = gamma-poly\n"
      "coeffs = 0.374, -0.12, 0.15\n"
      "l = 2.0\n"
      "n = 3\n"
      "[sweep]\n"
      "epsilon = 0.25, 0.125\n"
      "[mesh]\n"
      "nx = 48\n"
      "ny = 40\n"
      "h_base = 0.05\n"
      "[domain]\n"
      "height = 0.9\n"
      "[solver]\n"
      "k = 4\n"
      "tol = 1e-10\n"
      "max_iter = 900\n"
      "block_size = 8\n"
      "seed = 99\n"
      "[bounds]\n"
      "kappa = 0.55\n"
      "delta = 0.3\n"
      "[output]\n"
      "path = results/run1\n";
  const auto cfg = parse_config(text);
  CHECK(cfg.experiment == cli::ExperimentKind::BracketingCheck);
  CHECK(cfg.family == "gamma-poly");
  REQUIRE(cfg.coeffs.size() == 3);
  CHECK(cfg.coeffs[1] == doctest::Approx(-0.12));
  CHECK(cfg.L == doctest::Approx(2.0));
  CHECK(cfg.N == 3);
  REQUIRE(cfg.epsilon_grid.size() == 2);
  CHECK(cfg.nx == 48);
  CHECK(cfg.ny == 40);
  CHECK(cfg.h_base == doctest::Approx(0.05));
  CHECK(cfg.height == doctest::Approx(0.9));
  CHECK(cfg.k == 4);
  CHECK(cfg.tol == doctest::Approx(1e-10));
  CHECK(cfg.max_iter == 900);
  CHECK(cfg.block_size == 8);
  CHECK(cfg.seed == 99);
  CHECK(cfg.kappa == doctest::Approx(0.55));  // kappa wins over delta
  CHECK(cfg.output_path == "results/run1");
}

TEST_CASE("comments, case folding and whitespace") {
  const char* text =
      "; leading comment\n"
      "[EXPERIMENT]\n"
      "  TYPE   =   robin-limit   # trailing comment\n"
      "\n"
      "[Sweep]\n"
      "epsilon = 0.1, 0.01 ; eta grid\n";
  const auto cfg = parse_config(text);
  CHECK(cfg.experiment == cli::ExperimentKind::RobinLimit);
  REQUIRE(cfg.epsilon_grid.size() == 2);
  CHECK(cfg.epsilon_grid[1] == doctest::Approx(0.01));
}

TEST_CASE("missing experiment type is rejected") {
  CHECK(oracle::throws_with<ConfigError>([] { parse_config("[mesh]\nnx = 8\n"); },
                                         "experiment.type"));
}

TEST_CASE("unknown keys and sections are rejected with their path") {
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = tau-sweep\n[mesh]\nfoo = 3\n"); }, "mesh.foo"));
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = tau-sweep\n[mesh]\nfoo = 3\n"); }, "unknown key"));
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = tau-sweep\n[grid]\nnx = 3\n"); }, "grid.nx"));
  // line numbers point at the offending line
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = tau-sweep\n[mesh]\nfoo = 3\n"); }, "(line 4)"));
}

TEST_CASE("malformed syntax is rejected") {
  CHECK(oracle::throws_with<ConfigError>([] { parse_config("type = tau-sweep\n"); },
                                         "outside any [section]"));
  CHECK(oracle::throws_with<ConfigError>([] { parse_config("[experiment\ntype = x\n"); },
                                         "unterminated section"));
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype tau-sweep\n"); }, "expected 'key = value'"));
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = tau-sweep\n[mesh]\nnx = 12abc\n"); },
      "trailing characters"));
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = tau-sweep\n[mesh]\nnx = 12\nnx = 13\n"); },
      "duplicate key"));
}

TEST_CASE("domain-specific value validation") {
  auto with = [](const std::string& extra) {
    return "[experiment]\ntype = tau-sweep\n" + extra;
  };
  CHECK(oracle::throws_with<ConfigError>(
      [&] { parse_config(with("[sweep]\nepsilon = 0.5, 0\n")); },
      "epsilon_grid[1] must be positive"));
  CHECK(oracle::throws_with<ConfigError>(
      [&] { parse_config(with("[sweep]\nepsilon = 0.5, 0\n")); }, "sweep.epsilon"));
  CHECK(oracle::throws_with<ConfigError>(
      [&] { parse_config(with("[sweep]\nepsilon = 0.5, 0.25, 0.5\n")); }, "duplicates a value"));
  CHECK(oracle::throws_with<ConfigError>([&] { parse_config(with("[solver]\nk = 0\n")); },
                                         "k must be >= 1"));
  CHECK(oracle::throws_with<ConfigError>([&] { parse_config(with("[mesh]\nnx = 3\n")); },
                                         "mesh sizes must be >= 4"));
  CHECK(oracle::throws_with<ConfigError>([&] { parse_config(with("[mesh]\nh_base = 0\n")); },
                                         "h_base must be positive"));
  CHECK(oracle::throws_with<ConfigError>([&] { parse_config(with("[bounds]\nkappa = 1.0\n")); },
                                         "kappa must be < 1"));
  CHECK(oracle::throws_with<ConfigError>([&] { parse_config(with("[solver]\ntol = -1\n")); },
                                         "tol must be positive"));
  CHECK(oracle::throws_with<ConfigError>([&] { parse_config(with("[profile]\nn = 1\n")); },
                                         "N must be >= 2"));
  CHECK(oracle::throws_with<ConfigError>(
      [&] { parse_config(with("[experiment]\ntype = florp\n")); }, "duplicate key"));
  CHECK(oracle::throws_with<ConfigError>(
      [] { parse_config("[experiment]\ntype = florp\n"); }, "unknown experiment 'florp'"));
  CHECK(oracle::throws_with<ConfigError>(
      [&] { parse_config(with("[profile]\nfamily = oscillating\ncoeffs = 0.3, 0.1\n")); },
      "single amplitude"));
}

TEST_CASE("delta stands in for kappa when kappa is absent") {
  // N = 2: kappa = 1/2 - (1 - delta) + 1 = 1/2 + delta
  const auto d = parse_config("[experiment]\ntype = tau-sweep\n[bounds]\ndelta = 0.2\n");
  CHECK(d.kappa == doctest::Approx(0.7).epsilon(1e-12));
  const auto both =
      parse_config("[experiment]\ntype = tau-sweep\n[bounds]\nkappa = 0.5\ndelta = 0.2\n");
  CHECK(both.kappa == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("profile construction from config") {
  auto cfg = parse_config("[experiment]\ntype = tau-sweep\n");
  const auto p = cfg.make_profile(0.25);
  CHECK(p.family == geometry::ProfileFamily::GammaPoly);
  CHECK(p.eps == doctest::Approx(0.25));
  cfg.family = "width-poly";
  cfg.coeffs = {0.05};
  CHECK(cfg.make_profile(0.25).family == geometry::ProfileFamily::WidthPoly);
  cfg.family = "oscillating";
  CHECK(oracle::throws_with<ConfigError>([&] { (void)cfg.make_profile(0.25); },
                                         "needs a channel profile"));
  // request forwarding
  cfg.k = 5;
  cfg.tol = 1e-7;
  CHECK(cfg.make_request().k == 5);
  CHECK(cfg.make_request(2).k == 2);
  CHECK(cfg.make_request().tol == doctest::Approx(1e-7));
}

TEST_CASE("load_config reports unreadable paths") {
  CHECK(oracle::throws_with<ConfigError>(
      [] { (void)cli::load_config("/nonexistent/nowhere.ini"); }, "cannot open config file"));
}

TEST_CASE("reference text lists every section") {
  const std::string ref = cli::config_reference();
  for (const char* s : {"[experiment]", "[profile]", "[sweep]", "[mesh]", "[domain]",
                        "[solver]", "[bounds]", "[output]", "tau-sweep", "robin-limit"})
    CHECK(ref.find(s) != std::string::npos);
}

}  // TEST_SUITE
