#pragma once

// Seeded Monte Carlo runner comparing the LS and KRF estimators.

#include "bdris/estimators.hpp"
#include "bdris/model.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { none, group_size, pilot_length, antennas, ris_elements };
enum class Method { LS, KRF };

const char* to_string(SweepAxis axis);
const char* to_string(Method m);

struct AntennaPair {
  std::size_t mt = 1;
  std::size_t mr = 1;
};

struct ExperimentSpec {
  // Base configuration; q is derived as n / nbar for every cell.
  std::size_t mt = 2;
  std::size_t mr = 2;
  std::size_t n = 16;
  std::size_t nbar = 2;
  std::size_t t = 0;  // 0: minimal pilot length of each cell

  std::vector<double> snr_grid{0, 5, 10, 15, 20, 25, 30};
  SweepAxis axis = SweepAxis::none;
  std::vector<std::size_t> values;          // group_size, pilot_length, ris_elements
  std::vector<AntennaPair> antenna_values;  // antennas

  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_path;  // empty: do not write
  unsigned workers = 0;               // 0: hardware concurrency

  // Cells with t above this are rejected unless raised explicitly.
  std::size_t max_pilot_length = 1024;

  // One validated configuration per sweep value, snr_db unset.
  std::vector<SystemConfig> cells() const;
  void validate() const;
};

struct ResultRow {
  double snr_db = 0.0;
  std::size_t mt = 0, mr = 0, n = 0, nbar = 0, q = 0, t = 0;
  Method method = Method::LS;
  double nmse_mean = 0.0;
  double nmse_db = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct TrialResult {
  double nmse_ls = 0.0;
  double nmse_krf = 0.0;
};

// Seed of the random stream for one trial: a stable mix of the master seed,
// the configuration (dimensions and SNR) and the trial index.
std::uint64_t trial_seed(const SystemConfig& cfg, std::size_t trial_index, std::uint64_t master_seed);

// Channels, then noise, are drawn from one stream; both estimators see the
// same received signal.
TrialResult run_trial(const SystemConfig& cfg, std::size_t trial_index, std::uint64_t master_seed);
TrialResult run_trial(const SystemConfig& cfg, const TrainingDesign& td, std::size_t trial_index,
                      std::uint64_t master_seed);

// Rows in sweep-major, then SNR, then method order. Writes the CSV when
// spec.output_path is set; the path is opened before any trial runs.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

inline constexpr const char* kCsvHeader =
    "snr_db,mt,mr,n,nbar,q,t,method,nmse_mean,nmse_db,trials,seed";

std::string format_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

// Shortest decimal that parses back to the same double.
std::string shortest_repr(double x);

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst_error = 0.0;
};

// Training orthogonality, block unitarity and noise-free estimator
// exactness over a small dimension sweep.
std::vector<CheckResult> run_self_checks();

}  // namespace bdris
