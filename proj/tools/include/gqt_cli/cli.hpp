#pragma once

// Config-driven front end for the gqt library. Everything the `gqt` binary
// does goes through run(), so it can be driven in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gqt/canonical.hpp"
#include "gqt/dynamics.hpp"
#include "gqt/io.hpp"
#include "gqt/quditgas.hpp"
#include "gqt/sampling.hpp"
#include "gqt/volumes.hpp"

namespace gqt::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDegenerate = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

struct ProtocolConfig {
  HermitianObservable h0;
  HermitianObservable v;
  Schedule::Shape shape;
  double lambda_i;
  double lambda_f;
  double duration;
  std::size_t n_steps;
  std::optional<std::string> work_csv;

  Protocol build() const;
};

struct FirstLawConfig {
  double lambda0 = 0.0;
  double dlambda = 1e-3;
  std::size_t halvings = 0;  // extra rows with dlambda / 2, / 4, ...
};

/// Parsed and validated configuration. `source` keeps the merged JSON (file
/// plus command-line overrides) for print-config and the output metadata.
struct RunConfig {
  Json source;
  std::optional<std::size_t> dimension;
  std::optional<HermitianObservable> hamiltonian;
  std::string hamiltonian_spec = "none";
  std::optional<double> beta;
  std::vector<double> beta_grid;
  MeasureConvention convention = MeasureConvention::raw;
  SamplerConfig sampler{0, 100000, 1};
  std::optional<ProtocolConfig> protocol;
  std::optional<EnergyShell> shell;
  std::vector<double> energies;
  std::optional<SimplexSection> section;
  MeasurementAxis axis = MeasurementAxis::z();
  std::optional<HermitianObservable> observable;
  GeoMethod method = GeoMethod::quadrature;
  std::string estimator = "partition";
  FirstLawConfig firstlaw;
  std::optional<CMatrix> bipartite_psi;
  std::optional<Format> format;
  std::optional<std::string> out_path;

  /// β values to evaluate: the grid, or the single β.
  std::vector<double> betas() const;
  /// The Hamiltonian, or diag(0, 1, ..., D-1) when only the dimension is set.
  HermitianObservable hamiltonian_or_default() const;
};

/// Top-level keys accepted in a config file.
const std::vector<std::string>& config_keys();

/// Validates `j` (keys, types, Hermiticity) and builds the typed config.
/// Throws ConfigError.
RunConfig parse_config(const Json& j);

/// Parses text as JSON; throws ConfigError with the parser's message.
Json parse_config_text(const std::string& text);

/// Writes `content` to `path` via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

/// Full command-line entry point. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gqt::cli
