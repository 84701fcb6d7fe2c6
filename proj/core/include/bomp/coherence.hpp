#pragma once

#include <span>

#include "bomp/linalg.hpp"

namespace bomp {

/// Columns must have unit l2 norm to within this tolerance.
inline constexpr double kUnitNormTolerance = 1e-10;

/// Measurement matrix A (m x n) whose columns are grouped into L consecutive
/// blocks of d columns. Construction validates n = dL and unit-norm columns;
/// it never renormalizes.
class BlockDictionary {
 public:
  BlockDictionary(Matrix a, Index block_size);

  const Matrix& matrix() const noexcept { return a_; }
  BlockPartition partition() const noexcept { return part_; }

  Index rows() const noexcept { return a_.rows(); }
  Index cols() const noexcept { return a_.cols(); }
  Index block_size() const noexcept { return part_.size; }
  Index block_count() const noexcept { return part_.count; }

  /// Column block A_l.
  auto block(Index l) const { return a_.middleCols(part_.offset(l), part_.size); }

  /// [A_{l_1} ... A_{l_k}] in the order given.
  Matrix gather(std::span<const Index> blocks) const;

  /// Same matrix with a different block length (d = 1 gives the atom view).
  BlockDictionary repartitioned(Index block_size) const;

 private:
  Matrix a_;
  BlockPartition part_;
};

/// Maximum over a family of index pairs, with the lexicographically smallest
/// maximizing pair. Indices are columns or blocks depending on the metric.
struct PairMaximum {
  double value = 0.0;
  Index first = -1;
  Index second = -1;
};

struct CoherenceProfile {
  double mu = 0.0;
  double mu_block = 0.0;
  double nu = 0.0;
  double gershgorin_floor = 1.0;
  PairMaximum mu_pair;        // columns
  PairMaximum mu_block_pair;  // blocks
  PairMaximum nu_pair;        // columns (both inside one block)
};

/// max_{i != j} |a_i^T a_j|. Throws DegenerateError when n < 2.
double coherence(const BlockDictionary& dict);
PairMaximum coherence_pair(const BlockDictionary& dict);

/// max_{i != j} spectral_norm(A_i^T A_j) / d. Throws DegenerateError when
/// L < 2.
///
/// Pairs are visited in decreasing Frobenius norm of the cross-Gram block,
/// which bounds the spectral norm from above, so the scan stops as soon as
/// no remaining pair can beat the current maximum.
double block_coherence(const BlockDictionary& dict);
PairMaximum block_coherence_pair(const BlockDictionary& dict);

/// Largest |a_i^T a_j| over distinct columns of the same block; 0 for d = 1.
double sub_coherence(const BlockDictionary& dict);
PairMaximum sub_coherence_pair(const BlockDictionary& dict);

/// 1 - (d - 1) nu: Gershgorin lower bound on every lambda_min(A_l^T A_l).
double gershgorin_gram_floor(const BlockDictionary& dict);

CoherenceProfile coherence_profile(const BlockDictionary& dict);

struct OrthogonalizedDictionary {
  BlockDictionary dictionary;  // A~, orthonormal columns inside each block
  Matrix transform;            // block-diagonal V with A = A~ V
};

/// Per-block thin QR, A_l = A~_l V_l with positive diagonal in V_l so the
/// factorization is unique. Throws RankDeficientError carrying the block
/// index if some A_l is rank deficient.
OrthogonalizedDictionary orthogonalize_blocks(const BlockDictionary& dict);

/// True when m = R d with integral R, L > R and d > R L / (L - R), the
/// regime in which mu(A) >= mu_B(A~) is known to hold.
bool orthogonalization_advantage_applies(Index rows, Index block_size,
                                         Index block_count);

}  // namespace bomp
