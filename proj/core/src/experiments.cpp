#include "bomp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bomp/rng.hpp"

namespace bomp {

namespace {

enum StreamTag : std::uint64_t { kDictionaryStream = 1, kSignalStream = 2, kNoiseStream = 3 };

constexpr double kWilsonZ = 1.959963984540054;

}  // namespace

Index normalize_columns(Matrix& a) {
  Index zeros = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm == 0.0) {
      ++zeros;
    } else {
      a.col(j) /= norm;
    }
  }
  return zeros;
}

BlockDictionary gen_dictionary(Index m, Index n, Index d, std::uint64_t seed) {
  if (m < 1 || n < 1 || d < 1 || n % d != 0) {
    throw std::invalid_argument("gen_dictionary: need m, n >= 1 and d dividing n");
  }
  Rng rng(seed);
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) a(i, j) = rng.normal();
  }
  for (Index j = 0; j < n; ++j) {
    while (a.col(j).squaredNorm() == 0.0) {
      std::clog << "gen_dictionary: redrawing zero column " << j << " (seed " << seed << ")\n";
      for (Index i = 0; i < m; ++i) a(i, j) = rng.normal();
    }
  }
  normalize_columns(a);
  return BlockDictionary(std::move(a), d);
}

BlockSparseSignal gen_signal(Index block_count, Index d, Index k, std::uint64_t seed) {
  if (block_count < 1 || d < 1 || k < 0 || k > block_count) {
    throw std::invalid_argument("gen_signal: need 0 <= K <= L");
  }
  Rng rng(seed);
  std::vector<Index> blocks(static_cast<std::size_t>(block_count));
  for (Index l = 0; l < block_count; ++l) blocks[static_cast<std::size_t>(l)] = l;
  for (Index i = 0; i < k; ++i) {
    const auto remaining = static_cast<std::uint64_t>(block_count - i);
    const auto j = i + static_cast<Index>(rng.below(remaining));
    std::swap(blocks[static_cast<std::size_t>(i)], blocks[static_cast<std::size_t>(j)]);
  }
  blocks.resize(static_cast<std::size_t>(k));
  std::sort(blocks.begin(), blocks.end());

  const BlockPartition part(d, block_count);
  Vector x = Vector::Zero(part.dim());
  for (Index l : blocks) {
    auto block = x.segment(part.offset(l), d);
    for (Index e = 0; e < d; ++e) block(e) = rng.normal();
    while (block.squaredNorm() == 0.0) {
      std::clog << "gen_signal: redrawing zero block " << l << " (seed " << seed << ")\n";
      for (Index e = 0; e < d; ++e) block(e) = rng.normal();
    }
  }
  return BlockSparseSignal(std::move(x), part, BlockSupport(std::move(blocks), block_count));
}

Vector gen_noise(Index m, double sigma_w, std::uint64_t seed) {
  if (!(sigma_w >= 0.0)) throw std::invalid_argument("gen_noise: sigma_w must be >= 0");
  Vector w = Vector::Zero(m);
  if (sigma_w == 0.0) return w;
  Rng rng(seed);
  for (Index i = 0; i < m; ++i) w(i) = sigma_w * rng.normal();
  return w;
}

std::string_view to_string(Solver solver) {
  return solver == Solver::bomp ? "bomp" : "omp";
}

Solver parse_solver(std::string_view name) {
  if (name == "bomp") return Solver::bomp;
  if (name == "omp") return Solver::omp;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

TrialStreams TrialStreams::from(std::uint64_t trial_seed) {
  return {derive_seed(trial_seed, {kDictionaryStream}),
          derive_seed(trial_seed, {kSignalStream}), derive_seed(trial_seed, {kNoiseStream})};
}

TrialOutcome run_trial(const TrialSpec& spec, Solver solver, std::uint64_t seed, bool certify) {
  const TrialStreams streams = TrialStreams::from(seed);
  const BlockDictionary dict = gen_dictionary(spec.m, spec.n, spec.d, streams.dictionary);
  const BlockSparseSignal signal =
      gen_signal(dict.block_count(), spec.d, spec.k, streams.signal);
  const Vector w = gen_noise(spec.m, spec.sigma_w, streams.noise);
  const Vector y = dict.matrix() * signal.values() + w;

  TrialOutcome out;
  out.seed = seed;
  out.true_support = signal.support();
  const StoppingRule stop = StoppingRule::known_k(spec.k);

  if (solver == Solver::bomp) {
    out.trace = bomp(y, dict, stop, signal.support());
    out.chosen_blocks = out.trace.chosen;
    std::sort(out.chosen_blocks.begin(), out.chosen_blocks.end());
    out.success = out.chosen_blocks == signal.support().indices();
  } else {
    out.trace = omp(y, dict, stop);
    std::vector<Index> atoms = out.trace.chosen;
    std::sort(atoms.begin(), atoms.end());
    std::vector<Index> truth;
    for (Index i = 0; i < signal.values().size(); ++i) {
      if (signal.values()(i) != 0.0) truth.push_back(i);
    }
    out.success = atoms == truth;
    for (Index atom : atoms) out.chosen_blocks.push_back(atom / spec.d);
    out.chosen_blocks.erase(std::unique(out.chosen_blocks.begin(), out.chosen_blocks.end()),
                            out.chosen_blocks.end());
  }

  if (certify) {
    const NoiseDecomposition nd = decompose_noise(dict, signal, w);
    out.certificate = check_theorem1(block_coherence(dict), sub_coherence(dict), spec.k,
                                     spec.d, nd.omega, nd.x_block_min);
    out.certified = true;
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (m < 1 || n < 1 || d < 1 || n % d != 0) {
    throw std::invalid_argument("config: need m, n >= 1 and d dividing n");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  const Index blocks = n / d;
  for (Index k : k_values) {
    if (k < 1 || k > blocks || k > m / d) {
      throw std::invalid_argument("config: K = " + std::to_string(k) +
                                  " outside [1, min(L, floor(m/d))]");
    }
  }
  for (double s : sigma_w) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("config: sigma_w must be >= 0");
  }
  if (certify && blocks < 2) throw std::invalid_argument("config: certificates need L >= 2");
}

std::uint64_t trial_seed(std::uint64_t base_seed, Solver solver, Index k, double sigma_w,
                         Index trial) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(solver), static_cast<std::uint64_t>(k),
                                 std::bit_cast<std::uint64_t>(sigma_w),
                                 static_cast<std::uint64_t>(trial)});
}

double wilson_halfwidth(Index successes, Index trials) {
  if (trials <= 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  return kWilsonZ / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

const SweepCell* SweepResult::find(Solver solver, Index k, double sigma_w) const {
  for (const SweepCell& c : cells) {
    if (c.solver == solver && c.k == k && c.sigma_w == sigma_w) return &c;
  }
  return nullptr;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  SweepResult result;
  result.config = config;
  result.default_noise_grid = config.sigma_w == kDefaultNoiseGrid;
  for (Solver solver : config.solvers) {
    for (Index k : config.k_values) {
      for (double sigma : config.sigma_w) {
        SweepCell cell;
        cell.solver = solver;
        cell.k = k;
        cell.sigma_w = sigma;
        cell.trials = config.trials;
        result.cells.push_back(cell);
      }
    }
  }

  struct Slot {
    bool success = false;
    bool certified = false;
    std::optional<std::string> error;
  };
  const std::size_t per_cell = static_cast<std::size_t>(config.trials);
  const std::size_t total = result.cells.size() * per_cell;
  std::vector<Slot> slots(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto seed_of = [&](std::size_t index) {
    const SweepCell& cell = result.cells[index / per_cell];
    return trial_seed(config.base_seed, cell.solver, cell.k, cell.sigma_w,
                      static_cast<Index>(index % per_cell));
  };

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t index = next.fetch_add(1);
      if (index >= total) return;
      const SweepCell& cell = result.cells[index / per_cell];
      const TrialSpec spec{config.m, config.n, config.d, cell.k, cell.sigma_w};
      try {
        const TrialOutcome outcome = run_trial(spec, cell.solver, seed_of(index), config.certify);
        slots[index].success = outcome.success;
        slots[index].certified = outcome.certified && outcome.certificate.verdict;
      } catch (const std::exception& e) {
        slots[index].error = e.what();
        failed.store(true);
      }
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t index = 0; index < total; ++index) {
    if (slots[index].error) {
      const std::uint64_t seed = seed_of(index);
      throw TrialError("trial " + std::to_string(index % per_cell) + " failed (replay seed " +
                           std::to_string(seed) + "): " + *slots[index].error,
                       seed);
    }
  }

  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    SweepCell& cell = result.cells[c];
    for (std::size_t t = 0; t < per_cell; ++t) {
      const Slot& slot = slots[c * per_cell + t];
      cell.successes += slot.success ? 1 : 0;
      cell.certified += slot.certified ? 1 : 0;
      cell.certified_failures += (slot.certified && !slot.success) ? 1 : 0;
      cell.uncertified_successes += (!slot.certified && slot.success) ? 1 : 0;
    }
    cell.success_rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
    cell.ci_halfwidth = wilson_halfwidth(cell.successes, cell.trials);
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace bomp
