#pragma once

// Experiment configuration: a JSON document with "schema": 1. A user document
// is merged over the defaults; keys absent from the defaults are rejected, so
// typos fail loudly instead of being ignored.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyflow/field.hpp"
#include "levyflow/path.hpp"
#include "levyflow/transport.hpp"

namespace levyflow {

inline constexpr int kSchemaVersion = 1;

struct FieldSpec {
  /// "random_su2" | "zero" | "file"
  std::string kind = "random_su2";
  std::uint64_t seed = 1;
  int modes = 4;
  double amplitude = 0.3;
  int max_k = 2;
  std::string path;
};

struct CurveSpec {
  /// "fourier" | "line" | "circle"
  std::string kind = "fourier";
  std::uint64_t seed = 7;
  int modes = 3;
  double amplitude = 0.2;
  /// Expands a fourier spec into `count` curves with seeds seed, seed+1, ...
  int count = 1;
  std::vector<double> from;
  std::vector<double> to;
  std::vector<double> center;
  double radius = 0.5;
  double turns = 1.0;
};

struct FlowSpec {
  int grid = 64;
  double ds = 2.5e-4;
  double total = 0.151;
  /// Snapshot cadence (steps) for written trajectories.
  int save_every = 100;
  /// Distance (steps) between a checkpoint and its FD neighbours.
  int fd_spacing = 2;
  std::vector<double> checkpoints{0.05, 0.1, 0.15};
  std::uint64_t seed = 3;
  double amplitude = 0.3;
  int modes = 4;
  int max_k = 2;
  /// Grid and horizon of the abelian-oracle comparison.
  int abelian_grid = 64;
  double abelian_total = 0.1;
};

struct LevySpec {
  std::vector<int> cesaro_n{4, 8, 16, 32, 64};
  double fd_eps = 1e-3;
};

struct Tolerances {
  double unitarity = 1e-10;
  double group_law = 1e-8;
  double reparametrization = 1e-8;
  double duhamel = 1e-6;
  double first_derivative = 1e-5;
  double gradient = 1e-5;
  double kernel_form = 1e-4;
  double kernel_symmetry = 1e-10;
  double laplacian_routes = 1e-8;
  double cesaro = 0.05;
  double cesaro_slope = 0.3;
  /// n (estimate - exact) against the predicted leading coefficient.
  double cesaro_coefficient = 0.05;
  double functional = 1e-6;
  double functional_cesaro = 0.02;
  double functional_heat = 1e-8;
  double flow_action = 1e-8;
  double flow_oracle = 1e-6;
  /// Allowed relative deviation of measured order factors from 16.
  double order_factor = 0.2;
  double critical = 1e-6;
  double theorem_formula = 1e-6;
  double theorem_fd = 1e-3;
  double theorem_abelian = 1e-4;
  double r_exact = 1e-5;
  double r_localization = 1e-5;
};

struct ExperimentConfig {
  int schema = kSchemaVersion;
  std::uint64_t seed = 42;
  int dim = 2;
  double length = 6.283185307179586;
  int rank = 2;
  FieldSpec field;
  std::vector<CurveSpec> curves;
  TransportOptions transport;
  LevySpec levy;
  FlowSpec flow;
  Tolerances tolerances;
  int checks = 20;
  int threads = 1;
};

/// The defaults as a JSON document (the schema reference).
nlohmann::json default_config_json();
ExperimentConfig default_config();

/// Validates and converts. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Applies "a.b.c=value" to a document; value is parsed as JSON when possible
/// and taken as a string otherwise. Throws ConfigError on malformed input.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Reads `path` (defaults when empty), applies the overrides, validates.
/// Throws ConfigError, including when the file does not exist.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path,
                             const std::vector<std::string>& overrides = {});

// ----- resolution of specs into objects -----

Torus make_torus(const ExperimentConfig& cfg);
/// The configured field; random fields draw from derive_seed(cfg.seed, "field", spec.seed).
GaugeField make_field(const ExperimentConfig& cfg);
/// All curves, in order; fourier curves draw from derive_seed(cfg.seed, "curve", seed).
std::vector<Curve> make_curves(const ExperimentConfig& cfg);
/// Initial data for the heat flow, sampled on the flow grid.
GaugeField make_flow_initial(const ExperimentConfig& cfg);

}  // namespace levyflow
