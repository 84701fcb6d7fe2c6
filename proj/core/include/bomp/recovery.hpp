#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bomp/coherence.hpp"
#include "bomp/linalg.hpp"

namespace bomp {

/// Sorted set of distinct block indices in [0, L).
class BlockSupport {
 public:
  BlockSupport() = default;
  BlockSupport(std::vector<Index> indices, Index block_count);

  const std::vector<Index>& indices() const noexcept { return indices_; }
  Index size() const noexcept { return static_cast<Index>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  Index block_count() const noexcept { return block_count_; }
  bool contains(Index block) const;

  /// Block indices in [0, L) that are not in the support.
  std::vector<Index> complement() const;

  friend bool operator==(const BlockSupport&, const BlockSupport&) = default;

 private:
  std::vector<Index> indices_;
  Index block_count_ = 0;
};

/// Block-sparse vector together with its explicit block support. Blocks
/// outside the support are exactly zero and blocks inside it are not.
class BlockSparseSignal {
 public:
  BlockSparseSignal(Vector x, BlockPartition part, BlockSupport support);

  /// Support inferred from the nonzero blocks of `x`.
  static BlockSparseSignal from_dense(Vector x, Index block_size);

  const Vector& values() const noexcept { return x_; }
  BlockPartition partition() const noexcept { return part_; }
  const BlockSupport& support() const noexcept { return support_; }
  Index sparsity() const noexcept { return support_.size(); }

  auto block(Index l) const { return x_.segment(part_.offset(l), part_.size); }

  /// x_nz: the supported blocks stacked in support order.
  Vector nonzero_part() const;

 private:
  Vector x_;
  BlockPartition part_;
  BlockSupport support_;
};

/// When to stop the pursuit. `iterations` counts block selections.
struct StoppingRule {
  enum class Mode { known_k, residual_tol };

  Mode mode = Mode::known_k;
  Index k = 1;
  double epsilon = 0.0;
  Index max_iters = 1;

  /// Exactly `k` selections.
  static StoppingRule known_k(Index k);
  /// Stop once ||r_t||_2 < epsilon, or after `max_iters` selections.
  static StoppingRule residual_tol(double epsilon, Index max_iters);

  /// Throws std::invalid_argument if the rule is not usable with `dict`
  /// (k outside [1, L], epsilon < 0, or more than floor(m/d) selections).
  void validate(const BlockDictionary& dict) const;
};

enum class StopReason { k_reached, tol_reached, max_iters, stagnation };

std::string_view to_string(StopReason reason);

struct RecoveryTrace {
  /// Selected block (or atom, for omp) indices in selection order.
  std::vector<Index> chosen;
  /// ||r_t||_2 for t = 0..iterations; residual_norms[0] = ||y||_2.
  std::vector<double> residual_norms;
  /// Greedy selection ratio before each selection; only filled when the
  /// true support is supplied. +inf marks a degenerate residual.
  std::vector<double> gammas;
  /// Final least-squares coefficients scattered into a length-n vector.
  Vector estimate;
  Index iterations = 0;
  StopReason stop_reason = StopReason::k_reached;
};

/// Exact (bitwise for floating-point fields) trace equality.
bool operator==(const RecoveryTrace& a, const RecoveryTrace& b);

/// Block orthogonal matching pursuit.
///
/// Starting from r_0 = y, each iteration picks the not-yet-chosen block
/// maximizing ||A_i^T r_{t-1}||_2 (lowest index on ties), refits y by least
/// squares on all chosen blocks, and sets r_t = y - P y. Under
/// `residual_tol` the loop also stops after two consecutive iterations
/// whose relative residual decrease is below 1e-14.
///
/// Throws RecoveryError (with the iteration number) if a refit is rank
/// deficient.
RecoveryTrace bomp(const Vector& y, const BlockDictionary& dict,
                   const StoppingRule& stop,
                   const std::optional<BlockSupport>& oracle_support = std::nullopt);

/// Conventional OMP on the same matrix, i.e. bomp over single-column blocks.
/// `stop` is expressed in blocks of `dict`: known_k(K) runs K d atom
/// selections, and residual_tol's max_iters is likewise scaled by d.
RecoveryTrace omp(const Vector& y, const BlockDictionary& dict, const StoppingRule& stop);

/// max_{l not in I1} ||A_l^T r|| / max_{l in I1} ||A_l^T r||. A value below
/// one means the next selection is a true-support block. Throws
/// DegenerateResidualError when the denominator is below 1e-14.
double greedy_selection_ratio(const BlockDictionary& dict, const BlockSupport& support,
                              const Vector& r);

}  // namespace bomp
