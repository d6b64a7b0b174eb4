#include "neulap/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "neulap/errors.hpp"

namespace neulap::cli {

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::TauSweep: return "tau-sweep";
    case ExperimentKind::DumbbellSweep: return "dumbbell-sweep";
    case ExperimentKind::DirichletExample: return "dirichlet-example";
    case ExperimentKind::BoundsCheck: return "bounds-check";
    case ExperimentKind::RobinLimit: return "robin-limit";
    case ExperimentKind::MeshConvergence: return "mesh-convergence";
    case ExperimentKind::BracketingCheck: return "bracketing-check";
    case ExperimentKind::ScalingCheck: return "scaling-check";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& path, const std::string& what) {
  std::ostringstream os;
  os << "config error";
  if (line > 0) os << " (line " << line << ")";
  if (!path.empty()) os << " at " << path;
  os << ": " << what;
  throw ConfigError(os.str());
}

double parse_double(int line, const std::string& path, const std::string& v) {
  size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(line, path, "expected a number, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, path, "trailing characters in number '" + v + "'");
  if (!std::isfinite(x)) fail(line, path, "non-finite number");
  return x;
}

long long parse_int(int line, const std::string& path, const std::string& v) {
  size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    fail(line, path, "expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) fail(line, path, "trailing characters in integer '" + v + "'");
  return x;
}

std::vector<double> parse_list(int line, const std::string& path, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(line, path, "empty list element");
    out.push_back(parse_double(line, path, item));
  }
  if (out.empty()) fail(line, path, "empty list");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool have_experiment = false;
  bool kappa_set = false, delta_set = false;

  static const std::set<std::string> known = {
      "experiment.type",  "profile.family",   "profile.coeffs", "profile.l",
      "profile.n",        "sweep.epsilon",    "mesh.nx",        "mesh.ny",
      "mesh.h_base",      "domain.height",    "solver.k",       "solver.tol",
      "solver.max_iter",  "solver.block_size", "solver.seed",   "bounds.kappa",
      "bounds.delta",     "output.path"};

  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  std::set<std::string> seen;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "", "unterminated section header '" + raw + "'");
      section = trim(s.substr(1, s.size() - 2));
      std::transform(section.begin(), section.end(), section.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (section.empty()) fail(line, "", "empty section name");
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "", "expected 'key = value', got '" + raw + "'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (key.empty()) fail(line, "", "empty key");
    if (section.empty()) fail(line, key, "key outside any [section]");
    const std::string path = section + "." + key;
    if (!known.count(path)) fail(line, path, "unknown key");
    if (!seen.insert(path).second) fail(line, path, "duplicate key");

    if (path == "experiment.type") {
      bool ok = false;
      for (ExperimentKind k :
           {ExperimentKind::TauSweep, ExperimentKind::DumbbellSweep,
            ExperimentKind::DirichletExample, ExperimentKind::BoundsCheck,
            ExperimentKind::RobinLimit, ExperimentKind::MeshConvergence,
            ExperimentKind::BracketingCheck, ExperimentKind::ScalingCheck})
        if (val == experiment_name(k)) {
          cfg.experiment = k;
          ok = true;
        }
      if (!ok) fail(line, path, "unknown experiment '" + val + "'");
      have_experiment = true;
    } else if (path == "profile.family") {
      if (val != "gamma-poly" && val != "width-poly" && val != "oscillating")
        fail(line, path, "unknown family '" + val + "'");
      cfg.family = val;
    } else if (path == "profile.coeffs") {
      cfg.coeffs = parse_list(line, path, val);
    } else if (path == "profile.l") {
      cfg.L = parse_double(line, path, val);
      if (cfg.L <= 0.0) fail(line, path, "L must be positive");
    } else if (path == "profile.n") {
      const long long n = parse_int(line, path, val);
      if (n < 2) fail(line, path, "N must be >= 2");
      cfg.N = static_cast<int>(n);
    } else if (path == "sweep.epsilon") {
      cfg.epsilon_grid = parse_list(line, path, val);
    } else if (path == "mesh.nx" || path == "mesh.ny") {
      const long long n = parse_int(line, path, val);
      if (n < 4) fail(line, path, "mesh sizes must be >= 4");
      (path == "mesh.nx" ? cfg.nx : cfg.ny) = static_cast<int>(n);
    } else if (path == "mesh.h_base") {
      cfg.h_base = parse_double(line, path, val);
      if (cfg.h_base <= 0.0) fail(line, path, "h_base must be positive");
    } else if (path == "domain.height") {
      cfg.height = parse_double(line, path, val);
      if (cfg.height <= 0.0) fail(line, path, "height must be positive");
    } else if (path == "solver.k") {
      const long long n = parse_int(line, path, val);
      if (n < 1) fail(line, path, "k must be >= 1");
      cfg.k = static_cast<int>(n);
    } else if (path == "solver.tol") {
      cfg.tol = parse_double(line, path, val);
      if (cfg.tol <= 0.0) fail(line, path, "tol must be positive");
    } else if (path == "solver.max_iter") {
      const long long n = parse_int(line, path, val);
      if (n < 1) fail(line, path, "max_iter must be >= 1");
      cfg.max_iter = static_cast<int>(n);
    } else if (path == "solver.block_size") {
      const long long n = parse_int(line, path, val);
      if (n < 0) fail(line, path, "block_size must be >= 0");
      cfg.block_size = static_cast<int>(n);
    } else if (path == "solver.seed") {
      const long long n = parse_int(line, path, val);
      if (n < 0) fail(line, path, "seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(n);
    } else if (path == "bounds.kappa") {
      cfg.kappa = parse_double(line, path, val);
      kappa_set = true;
    } else if (path == "bounds.delta") {
      cfg.delta = parse_double(line, path, val);
      if (cfg.delta <= 0.0) fail(line, path, "delta must be positive");
      delta_set = true;
    } else if (path == "output.path") {
      if (val.empty()) fail(line, path, "empty output path");
      cfg.output_path = val;
    }
  }

  if (!have_experiment) fail(0, "experiment.type", "missing (required)");
  if (!kappa_set && delta_set)
    cfg.kappa = 0.5 * (cfg.N - 1) - (cfg.N - 1 - cfg.delta) + 1.0;
  if (cfg.kappa >= 1.0) fail(0, "bounds.kappa", "kappa must be < 1");
  if (cfg.coeffs.empty()) fail(0, "profile.coeffs", "needs at least one coefficient");
  if (cfg.family == "oscillating") {
    if (cfg.coeffs.size() != 1 || cfg.coeffs[0] < 0.0)
      fail(0, "profile.coeffs", "oscillating family takes a single amplitude >= 0");
  }
  for (size_t i = 0; i < cfg.epsilon_grid.size(); ++i) {
    if (!(cfg.epsilon_grid[i] > 0.0))
      fail(0, "sweep.epsilon", "epsilon_grid[" + std::to_string(i) + "] must be positive");
    for (size_t j = 0; j < i; ++j)
      if (cfg.epsilon_grid[i] == cfg.epsilon_grid[j])
        fail(0, "sweep.epsilon", "epsilon_grid[" + std::to_string(i) + "] duplicates a value");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str());
}

geometry::ChannelProfile ExperimentConfig::make_profile(double eps) const {
  if (family == "gamma-poly") return geometry::gamma_poly_profile(coeffs, L, eps, N);
  if (family == "width-poly") {
    auto p = geometry::width_poly_profile(coeffs, L, N);
    p.eps = eps;
    return p;
  }
  throw ConfigError("experiment needs a channel profile, config has family '" + family + "'");
}

eigs::EigenRequest ExperimentConfig::make_request(int k_override) const {
  eigs::EigenRequest req;
  req.k = k_override > 0 ? k_override : k;
  req.tol = tol;
  req.max_iter = max_iter;
  req.block_size = block_size;
  req.seed = seed;
  return req;
}

std::string config_reference() {
  return
      "config file format: INI-style 'key = value' lines under [section] headers;\n"
      "'#' or ';' start comments; unknown keys are rejected.\n"
      "\n"
      "[experiment]\n"
      "  type        (required) one of: tau-sweep, dumbbell-sweep, dirichlet-example,\n"
      "              bounds-check, robin-limit, mesh-convergence, bracketing-check,\n"
      "              scaling-check\n"
      "[profile]\n"
      "  family      gamma-poly (default) | width-poly | oscillating\n"
      "              gamma-poly: g = gamma^(1/eps), gamma = sum coeffs[k]*(L-s)^k\n"
      "              width-poly: g = sum coeffs[k]*s^k\n"
      "              oscillating: coeffs = single amplitude a of the top boundary\n"
      "  coeffs      comma list, default 0.3, 0, 0.2\n"
      "  L           channel length, default 1.0\n"
      "  N           ambient dimension, default 2 (meshes are N=2 only)\n"
      "[sweep]\n"
      "  epsilon     comma list, default 0.5, 0.35, 0.25, 0.18, 0.125; must be\n"
      "              positive and distinct; rows run in descending order.\n"
      "              robin-limit reads its eta values from this list.\n"
      "[mesh]\n"
      "  nx, ny      channel grid, default 64 x 64 (>= 4); tau runs solve at\n"
      "              (nx, ny) and (2nx, 2ny) for extrapolation\n"
      "  h_base      base-rectangle element size, default 0.015625 (= 1/64)\n"
      "[domain]\n"
      "  height      base rectangle height, default 0.83\n"
      "[solver]\n"
      "  k           eigenpairs per solve, default 6\n"
      "  tol         relative residual tolerance, default 1e-8\n"
      "  max_iter    default 500 (raise for fine decaying-channel meshes)\n"
      "  block_size  0 = auto (k + max(2, k/2))\n"
      "  seed        random initial block seed, default 12345\n"
      "[bounds]\n"
      "  kappa       default 0.6; must be < 1; wins over delta when both given\n"
      "  delta       default 0.1; kappa = (N-1)/2 - (N-1-delta) + 1 when kappa unset\n"
      "[output]\n"
      "  path        output directory, default 'out'\n";
}

}  // namespace neulap::cli
