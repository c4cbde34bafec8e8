// Copyright 2026 The Smoothcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Batch front-end: computes profiles and tradeoff curves, composes
// mechanisms, certifies robustness, sweeps radii, and compares against the
// RDP baseline. Emits CSV/JSON with a resolved-config hash header.
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "smoothcert/certify.hpp"
#include "smoothcert/duality.hpp"
#include "smoothcert/errors.hpp"
#include "smoothcert/mechanisms.hpp"
#include "smoothcert/pld.hpp"
#include "smoothcert/rdp.hpp"

namespace {

using nlohmann::json;
using namespace smoothcert;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  json root;  // resolved config
  std::string out_path;
  int threads = 1;

  double bucket_width = 1e-4;
  double eps_lo = -20, eps_hi = 20;
  int eps_points = 4001;
};

std::string format_number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string config_hash(const RunConfig& config) {
  std::ostringstream src;
  src << config.command << '|' << config.root.dump() << '|'
      << format_number(config.bucket_width) << '|'
      << format_number(config.eps_lo) << ':' << format_number(config.eps_hi)
      << '|' << config.eps_points;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(fnv1a(src.str())));
  return buffer;
}

std::string csv_header(const RunConfig& config) {
  return "# smoothcert " + config.command + " config_hash=" +
         config_hash(config) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
}

std::vector<double> make_grid(const RunConfig& config) {
  if (config.eps_points < 2) throw ConfigError("eps_points must be >= 2");
  if (!(config.eps_lo < config.eps_hi)) {
    throw ConfigError("eps-range must satisfy lo < hi");
  }
  std::vector<double> grid(static_cast<std::size_t>(config.eps_points));
  for (int i = 0; i < config.eps_points; ++i) {
    grid[static_cast<std::size_t>(i)] =
        config.eps_lo +
        (config.eps_hi - config.eps_lo) * i / (config.eps_points - 1);
  }
  return grid;
}

DiscretizationSpec make_disc(const RunConfig& config) {
  DiscretizationSpec disc;
  disc.bucket_width = config.bucket_width;
  return disc;
}

MechanismSpec mechanism_from_config(const RunConfig& config) {
  if (!config.root.contains("mechanism")) {
    throw ConfigError("config is missing \"mechanism\"");
  }
  return MechanismSpec::from_json_string(config.root.at("mechanism").dump());
}

NeighboringRelation threat_from_config(const RunConfig& config) {
  if (!config.root.contains("threat")) {
    throw ConfigError("config is missing \"threat\"");
  }
  const json& threat = config.root.at("threat");
  if (threat.contains("type")) {
    return NeighboringRelation::from_json_string(threat.dump());
  }
  // Shorthand: {"train_radius": R, "test_radius": d}.
  if (threat.contains("train_radius") || threat.contains("test_radius")) {
    const int train = threat.value("train_radius", 0);
    const double test = threat.value("test_radius", 0.0);
    if (test > 0) {
      return NeighboringRelation::joint(
          NeighboringRelation::dataset_changes(train),
          NeighboringRelation::l2_ball(test));
    }
    return NeighboringRelation::dataset_changes(train);
  }
  throw ConfigError("threat needs either \"type\" or train/test radii");
}

ProbabilityBounds bounds_from_config(const RunConfig& config) {
  if (config.root.contains("bounds")) {
    const json& b = config.root.at("bounds");
    return ProbabilityBounds::exact(b.at("p1_lower").get<double>(),
                                    b.at("p2_upper").get<double>());
  }
  if (config.root.contains("counts")) {
    return ProbabilityBounds::from_monte_carlo(
        config.root.at("counts").get<std::vector<std::int64_t>>(),
        config.root.at("total").get<std::int64_t>(),
        config.root.at("confidence").get<double>());
  }
  throw ConfigError("config needs \"bounds\" or \"counts\"/\"total\"/"
                    "\"confidence\"");
}

std::vector<double> radii_from_config(const RunConfig& config) {
  if (!config.root.contains("radii")) {
    throw ConfigError("config is missing \"radii\"");
  }
  const auto radii = config.root.at("radii").get<std::vector<double>>();
  if (radii.empty()) throw ConfigError("radii list must be non-empty");
  return radii;
}

// Deterministic ordered parallel map over indices [0, n).
template <typename Fn>
void parallel_for(int threads, std::size_t n, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(threads, static_cast<int>(n));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

int run_profile(const RunConfig& config) {
  const auto mechanism = mechanism_from_config(config);
  const auto threat = threat_from_config(config);
  const auto grid = make_grid(config);
  const auto profiles =
      mechanism_profile(mechanism, threat, grid, make_disc(config));
  std::ostringstream out;
  out << csv_header(config);
  out << "relation,epsilon,delta\n";
  for (const auto& rp : profiles) {
    for (double eps : grid) {
      out << rp.relation.describe() << ',' << format_number(eps) << ','
          << format_number(rp.profile(eps)) << '\n';
    }
  }
  write_file(config.out_path, out.str());
  return kExitOk;
}

int run_tradeoff(const RunConfig& config) {
  const auto mechanism = mechanism_from_config(config);
  const auto threat = threat_from_config(config);
  const auto grid = make_grid(config);
  const auto profiles =
      mechanism_profile(mechanism, threat, grid, make_disc(config));
  const int alpha_points = config.root.value("alpha_points", 201);
  if (alpha_points < 2) throw ConfigError("alpha_points must be >= 2");
  std::ostringstream out;
  out << csv_header(config);
  out << "alpha,f\n";
  std::vector<double> values(static_cast<std::size_t>(alpha_points));
  parallel_for(config.threads, values.size(), [&](std::size_t i) {
    const double alpha = static_cast<double>(i) / (alpha_points - 1);
    double best = 1.0;
    for (const auto& rp : profiles) {
      best = std::min(best, dual_to_primal(rp.profile, alpha));
    }
    values[i] = best;
  });
  for (int i = 0; i < alpha_points; ++i) {
    const double alpha = static_cast<double>(i) / (alpha_points - 1);
    out << format_number(alpha) << ','
        << format_number(values[static_cast<std::size_t>(i)]) << '\n';
  }
  write_file(config.out_path, out.str());
  return kExitOk;
}

// Serializes the composed PLD of the mechanism stack for a leaf threat.
int run_compose(const RunConfig& config) {
  const auto mechanism = mechanism_from_config(config);
  const auto threat = threat_from_config(config);
  const auto leaves = decompose_relation(threat);
  if (leaves.size() != 1) {
    throw ConfigError(
        "compose needs a leaf relation (add_remove/l2_ball/joint of those); "
        "dataset_changes decomposes into several");
  }
  const DiscretePLD pld =
      mechanism_pld(mechanism, leaves.front(), make_disc(config));
  json j = json::parse(pld.to_json_string());
  j["config_hash"] = config_hash(config);
  write_file(config.out_path, j.dump() + "\n");
  return kExitOk;
}

int run_certify(const RunConfig& config) {
  const auto mechanism = mechanism_from_config(config);
  const auto threat = threat_from_config(config);
  const auto bounds = bounds_from_config(config);
  const auto profiles = mechanism_profile(mechanism, threat, make_grid(config),
                                          make_disc(config));
  const auto result = certify(bounds, profiles);
  json j;
  j["config_hash"] = config_hash(config);
  j["robust"] = result.robust;
  j["margin"] = result.margin;
  j["binding_relation"] = result.binding_relation;
  j["per_relation_margins"] = result.per_relation_margins;
  json rels = json::array();
  for (const auto& rp : profiles) rels.push_back(rp.relation.describe());
  j["relations"] = std::move(rels);
  write_file(config.out_path, j.dump(2) + "\n");
  return kExitOk;
}

struct SweepRow {
  double radius;
  double test_radius;
  CertificateResult result;
};

void append_row(std::ostringstream& out, const SweepRow& row,
                const std::string& method = "") {
  out << format_number(row.radius) << ',' << format_number(row.test_radius)
      << ',' << format_number(row.result.margin) << ','
      << (row.result.robust ? "true" : "false") << ','
      << row.result.binding_relation;
  if (!method.empty()) out << ',' << method;
  out << '\n';
}

int run_radius_sweep(const RunConfig& config) {
  const auto mechanism = mechanism_from_config(config);
  const auto bounds = bounds_from_config(config);
  const auto radii = radii_from_config(config);
  const double test_radius = config.root.value("test_radius", 0.0);
  const auto grid = make_grid(config);
  const auto disc = make_disc(config);
  std::vector<SweepRow> rows(radii.size());
  parallel_for(config.threads, radii.size(), [&](std::size_t i) {
    const int train = static_cast<int>(radii[i]);
    rows[i].radius = radii[i];
    rows[i].test_radius = test_radius;
    rows[i].result =
        joint_certify(train, test_radius, mechanism, bounds, grid, disc);
  });
  std::ostringstream out;
  out << csv_header(config);
  out << "radius,test_radius,margin,robust,binding_relation\n";
  for (const auto& row : rows) append_row(out, row);
  write_file(config.out_path, out.str());
  return kExitOk;
}

int run_compare_rdp(const RunConfig& config) {
  const auto mechanism = mechanism_from_config(config);
  if (mechanism.kind() != MechanismSpec::Kind::kSubsampledGaussian) {
    throw ConfigError("compare-rdp needs a subsampled_gaussian mechanism");
  }
  const auto bounds = bounds_from_config(config);
  const auto radii = radii_from_config(config);
  const auto grid = make_grid(config);
  const auto disc = make_disc(config);
  const auto orders = default_rdp_orders();

  std::vector<SweepRow> profile_rows(radii.size());
  std::vector<SweepRow> rdp_rows(radii.size());
  parallel_for(config.threads, radii.size(), [&](std::size_t i) {
    const int r = static_cast<int>(radii[i]);
    profile_rows[i].radius = radii[i];
    rdp_rows[i].radius = radii[i];
    profile_rows[i].result = certify(
        bounds,
        mechanism_profile(mechanism, NeighboringRelation::dataset_changes(r),
                          grid, disc));
    if (r == 0) {
      // Trivial threat: an identical pair on both methods.
      rdp_rows[i].result =
          certify(bounds, std::vector<PrivacyProfile>{
                              PrivacyProfile::identical(grid)});
      return;
    }
    RdpCurve curve;
    curve.orders = orders;
    curve.values.reserve(orders.size());
    for (double order : orders) {
      curve.values.push_back(
          rdp_group_corrected(order, mechanism.gamma(), mechanism.sigma(), r));
    }
    const RdpCurve composed = rdp_compose(curve, mechanism.iterations());
    rdp_rows[i].result =
        certify(bounds, std::vector<PrivacyProfile>{
                            profile_from_rdp(composed, grid)});
  });
  std::ostringstream out;
  out << csv_header(config);
  out << "radius,test_radius,margin,robust,binding_relation,method\n";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    append_row(out, profile_rows[i], "profile");
    append_row(out, rdp_rows[i], "rdp");
  }
  write_file(config.out_path, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-profile robustness certification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path = "out.csv";
  std::optional<double> flag_bucket_width;
  std::optional<std::string> flag_eps_range;
  std::optional<int> flag_eps_points;
  int threads = 1;
  bool strict = false;

  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_path, "output file path");
  app.add_option("--bucket-width", flag_bucket_width, "PLD bucket width");
  app.add_option("--eps-range", flag_eps_range, "epsilon grid range lo:hi");
  app.add_option("--eps-points", flag_eps_points, "epsilon grid points");
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_flag("--strict", strict,
               "fail instead of preferring config values on conflicts");

  for (const char* name : {"profile", "tradeoff", "compose", "certify",
                           "radius-sweep", "compare-rdp"}) {
    app.add_subcommand(name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  RunConfig config;
  config.command = app.get_subcommands().front()->get_name();
  config.out_path = out_path;
  config.threads = threads;

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file: " + config_path);
    try {
      in >> config.root;
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }

    // Grid parameters: the config file wins over flags unless --strict, in
    // which case a conflict is an error.
    const json grid_cfg = config.root.value("grid", json::object());
    auto resolve = [&strict](const char* name, auto& target,
                             const auto& config_value,
                             const auto& flag_value) {
      if (config_value.has_value() && flag_value.has_value() && strict &&
          *config_value != *flag_value) {
        throw ConfigError(std::string("--strict: both config and flag set ") +
                          name + " with different values");
      }
      if (config_value.has_value()) {
        target = *config_value;
      } else if (flag_value.has_value()) {
        target = *flag_value;
      }
    };
    std::optional<double> cfg_width;
    if (grid_cfg.contains("bucket_width")) {
      cfg_width = grid_cfg.at("bucket_width").get<double>();
    }
    resolve("bucket-width", config.bucket_width, cfg_width, flag_bucket_width);

    std::optional<std::pair<double, double>> cfg_range;
    if (grid_cfg.contains("eps_range")) {
      const auto range = grid_cfg.at("eps_range").get<std::vector<double>>();
      if (range.size() != 2) throw ConfigError("eps_range needs two values");
      cfg_range = {range[0], range[1]};
    }
    std::optional<std::pair<double, double>> flag_range;
    if (flag_eps_range.has_value()) {
      const auto pos = flag_eps_range->find(':');
      if (pos == std::string::npos) {
        throw ConfigError("--eps-range must look like lo:hi");
      }
      try {
        flag_range = {std::stod(flag_eps_range->substr(0, pos)),
                      std::stod(flag_eps_range->substr(pos + 1))};
      } catch (const std::exception&) {
        throw ConfigError("--eps-range must look like lo:hi");
      }
    }
    std::pair<double, double> range{config.eps_lo, config.eps_hi};
    resolve("eps-range", range, cfg_range, flag_range);
    config.eps_lo = range.first;
    config.eps_hi = range.second;

    std::optional<int> cfg_points;
    if (grid_cfg.contains("eps_points")) {
      cfg_points = grid_cfg.at("eps_points").get<int>();
    }
    resolve("eps-points", config.eps_points, cfg_points, flag_eps_points);

    if (!(config.bucket_width > 0)) {
      throw ConfigError("bucket width must be positive");
    }
    if (config.threads < 1) throw ConfigError("--threads must be >= 1");

    if (config.command == "profile") return run_profile(config);
    if (config.command == "tradeoff") return run_tradeoff(config);
    if (config.command == "compose") return run_compose(config);
    if (config.command == "certify") return run_certify(config);
    if (config.command == "radius-sweep") return run_radius_sweep(config);
    if (config.command == "compare-rdp") return run_compare_rdp(config);
    throw ConfigError("unknown command: " + config.command);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericFailureError& e) {
    std::cerr << "numeric failure: " << e.what()
              << " (achieved error: " << e.achieved_error() << ")\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}
