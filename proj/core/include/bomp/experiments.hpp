#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bomp/certificates.hpp"
#include "bomp/coherence.hpp"
#include "bomp/recovery.hpp"

namespace bomp {

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Scales every column to unit l2 norm. Zero columns are left untouched and
/// reported through the return value (number of zero columns).
Index normalize_columns(Matrix& a);

/// m x n matrix with i.i.d. N(0,1) entries, columns then scaled to unit norm,
/// grouped into consecutive blocks of d. A column that comes out exactly
/// zero is redrawn (and logged to stderr).
BlockDictionary gen_dictionary(Index m, Index n, Index d, std::uint64_t seed);

/// Uniform K-subset of the L blocks (partial Fisher-Yates), i.i.d. N(0,1)
/// entries on the support, exact zeros elsewhere.
BlockSparseSignal gen_signal(Index block_count, Index d, Index k, std::uint64_t seed);

/// i.i.d. N(0, sigma_w^2); sigma_w = 0 yields the exact zero vector.
Vector gen_noise(Index m, double sigma_w, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trials and sweeps
// ---------------------------------------------------------------------------

enum class Solver { bomp, omp };

std::string_view to_string(Solver solver);
Solver parse_solver(std::string_view name);

struct TrialSpec {
  Index m = 40;
  Index n = 400;
  Index d = 4;
  Index k = 1;
  double sigma_w = 0.0;
};

struct TrialOutcome {
  bool success = false;
  RecoveryTrace trace;
  BlockSupport true_support;
  /// Blocks touched by the first K (BOMP) or K d (OMP) selections.
  std::vector<Index> chosen_blocks;
  bool certified = false;  // certificate evaluated
  RecoveryCertificate certificate;
  std::uint64_t seed = 0;
};

/// Substream seeds of a trial, derived from the trial seed.
struct TrialStreams {
  std::uint64_t dictionary;
  std::uint64_t signal;
  std::uint64_t noise;

  static TrialStreams from(std::uint64_t trial_seed);
};

/// One Monte Carlo run: fresh dictionary, signal and noise from `seed`,
/// y = A x + w, solver in known-K mode. BOMP succeeds when its K selected
/// blocks are the true support; OMP succeeds when its K d selected atoms are
/// exactly the nonzero atoms of x. With `certify` the noisy block
/// certificate for the instance is attached.
TrialOutcome run_trial(const TrialSpec& spec, Solver solver, std::uint64_t seed,
                       bool certify = true);

/// Solver failure inside a sweep; carries the seed that replays it.
class TrialError : public std::runtime_error {
 public:
  TrialError(const std::string& what, std::uint64_t seed)
      : std::runtime_error(what), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Noise levels used when none are given.
inline const std::vector<double> kDefaultNoiseGrid{0.01, 0.05, 0.1, 0.2};

struct ExperimentConfig {
  Index m = 40;
  Index n = 400;
  Index d = 4;
  std::vector<Index> k_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> sigma_w = kDefaultNoiseGrid;
  Index trials = 1000;
  std::uint64_t base_seed = 1;
  std::vector<Solver> solvers{Solver::bomp, Solver::omp};
  bool certify = true;
  /// Worker threads; 0 picks hardware concurrency. Never affects results.
  unsigned threads = 0;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

/// Seed of one trial, keyed on the whole grid coordinate.
std::uint64_t trial_seed(std::uint64_t base_seed, Solver solver, Index k, double sigma_w,
                         Index trial);

struct SweepCell {
  Solver solver = Solver::bomp;
  Index k = 1;
  double sigma_w = 0.0;
  Index trials = 0;
  Index successes = 0;
  double success_rate = 0.0;
  double ci_halfwidth = 0.0;
  /// Trials whose block certificate held, and those among them that failed.
  Index certified = 0;
  Index certified_failures = 0;
  /// Trials recovered although the certificate did not hold.
  Index uncertified_successes = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepCell> cells;  // solver-major, then K, then sigma_w
  bool default_noise_grid = false;
  double wall_seconds = 0.0;

  const SweepCell* find(Solver solver, Index k, double sigma_w) const;
};

/// Runs the full solver x K x sigma_w grid. Results depend only on the
/// configuration (not on `threads` or scheduling). Throws TrialError for the
/// lowest-indexed failing trial.
SweepResult run_sweep(const ExperimentConfig& config);

/// 95% Wilson score interval half-width for `successes` out of `trials`.
double wilson_halfwidth(Index successes, Index trials);

// ---------------------------------------------------------------------------
// Config and result formats
// ---------------------------------------------------------------------------

/// JSON object mirroring ExperimentConfig field for field; missing fields keep
/// their defaults. `solvers` is a list of "bomp" / "omp".
ExperimentConfig parse_experiment_config(std::string_view json);
std::string experiment_config_json(const ExperimentConfig& config);

enum class ResultFormat { csv, json, svg };

ResultFormat parse_result_format(std::string_view name);

/// Header `solver,K,sigma_w,trials,successes,success_rate,ci_halfwidth`.
/// Doubles are written in shortest round-trip form.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::vector<SweepCell> parse_sweep_csv(std::istream& in);

void write_sweep_json(std::ostream& out, const SweepResult& result);

/// Success rate against K, one polyline per (solver, sigma_w).
void write_sweep_svg(std::ostream& out, const SweepResult& result);

void emit_results(const SweepResult& result, ResultFormat format,
                  const std::filesystem::path& path);
void emit_results(const SweepResult& result, ResultFormat format, std::ostream& out);

}  // namespace bomp
