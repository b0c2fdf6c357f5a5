#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "obsrobust/core.hpp"
#include "obsrobust/spectral.hpp"

namespace obsrobust {

enum class BaselineOrder { degree, random };
enum class BaselineMode { numeric, structural };

/// Sensors sorted by the in-degree of their measured state in D(A)
/// (self-loops excluded), descending; ties by state index, then sensor index.
std::vector<int> degree_order(const StructuredSystem& sys);

/// Removes sensors one at a time in the given order and returns how many
/// were removed when observability (numeric or structural) first failed.
int baseline_removal(const DenseSystem& sys, BaselineOrder order, BaselineMode mode,
                     std::uint64_t seed = 0, const Tolerances& tol = {});

struct ExperimentConfig {
  std::vector<int> n_values{20};
  std::vector<double> c_values{3.0};
  int instances_per_cell = 10;
  double sensor_fraction = 0.4;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"alg1", "alg3", "alg3_dm", "degree", "random"};
  int multiplicity_cap = 5;
  int max_deficiency = 8;
  bool timing = true;   // false writes wall_ms as 0 so reruns are byte-identical
  int threads = 1;
  Tolerances tol;

  void validate() const;
};

/// Flat key = value document; lists in brackets, '#' comments.
ExperimentConfig parse_experiment_config(std::string_view text);

struct ExperimentRow {
  int n = 0;
  double c = 0.0;
  int instance = 0;
  std::uint64_t seed = 0;
  std::string method;
  int removed = 0;
  int total_sensors = 0;
  double ratio = 0.0;
  double wall_ms = 0.0;
  std::string status = "ok";
};

struct SummaryRow {
  int n = 0;
  double c = 0.0;
  std::string method;
  int count = 0;        // rows with status ok
  double mean_ratio = 0.0;
};

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);
std::string experiment_csv(const std::vector<ExperimentRow>& rows);
std::vector<SummaryRow> summarize(const std::vector<ExperimentRow>& rows);
std::string summary_table(const std::vector<SummaryRow>& rows);

}  // namespace obsrobust
