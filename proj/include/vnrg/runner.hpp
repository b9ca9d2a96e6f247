#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vnrg/diagnostics.hpp"
#include "vnrg/dmrg.hpp"
#include "vnrg/models.hpp"
#include "vnrg/nrg.hpp"
#include "vnrg/variational.hpp"

namespace vnrg {

inline constexpr int kConfigVersion = 1;
inline constexpr int kResultsSchemaVersion = 1;

struct ModelConfig {
  enum class Kind { Ising, Siam };
  Kind kind = Kind::Ising;
  IsingParams ising;
  SiamParams siam;
  Mpo build() const;
};

struct NrgStageConfig {
  std::size_t D = 64;
  std::optional<std::size_t> M;
  bool sectors = false;
};

struct ExperimentConfig {
  ModelConfig model;
  /// Ordered subset of {"nrg", "dmrg", "vnrg"}; each stage starts from the
  /// previous stage's state.
  std::vector<std::string> methods;
  NrgStageConfig nrg;
  TargetConfig dmrg;
  SweepConfig vnrg;
  /// Start for a leading vnrg stage: "nrg" or "random".
  std::string vnrg_init = "nrg";
  std::uint64_t seed = 1;
  std::string output_dir = "results";
  bool oracle = false;

  void validate() const;
};

/// Parses the YAML config text; errors name the source, line and field.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::size_t state_index = 0;
  std::string method;
  double energy = 0.0;
  double variance = 0.0;
  std::optional<double> delta_e_exact;
  double fidelity_bound = 0.0;
  std::optional<Charge> sector;
  double stage_walltime_ms = 0.0;
};

struct StageOutcome {
  std::string method;
  NrgMps state;
  Spectrum spectrum;
  std::vector<AccuracyRecord> accuracy;
  double walltime_ms = 0.0;
  std::vector<std::string> warnings;
  std::optional<SweepReport> sweep_report;
  std::optional<DmrgResult> dmrg;
};

struct ExperimentResult {
  std::vector<StageOutcome> stages;
  std::vector<ResultRow> rows;
  std::optional<std::vector<double>> exact;
  std::string oracle_name;
};

/// Runs the configured stages. Writes results.csv, the trace CSVs, a
/// checkpoint per stage and metadata.json into output_dir unless `write` is
/// false.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write = true);

/// Lowest `count` exact levels from the cheapest applicable oracle.
std::vector<double> exact_levels(const ModelConfig& model, std::size_t count, std::string* oracle_name = nullptr);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string format_real(double v);

struct CsvComparison {
  bool equal = true;
  std::vector<std::string> differences;
};

/// Compares two result tables cell by cell, ignoring stage_walltime_ms.
/// Numeric cells may differ by at most `tol` (absolute); tol = 0 demands
/// identical text.
CsvComparison compare_csv_text(const std::string& a, const std::string& b, double tol = 0.0);
CsvComparison compare_csv_files(const std::string& path_a, const std::string& path_b, double tol = 0.0);

}  // namespace vnrg
