#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace bomp {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Equal-length split of a dimension into `count` consecutive blocks of
/// `size` entries each.
struct BlockPartition {
  Index size = 1;
  Index count = 1;

  BlockPartition() = default;
  BlockPartition(Index block_size, Index block_count);

  /// Partition of `dim` into blocks of `block_size`; throws PartitionError
  /// unless `block_size` divides `dim`.
  static BlockPartition of_length(Index dim, Index block_size);

  Index dim() const noexcept { return size * count; }
  Index offset(Index block) const noexcept { return block * size; }

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;
};

enum class MixedNorm { one, two, inf };

/// Euclidean norm of every block of `z`.
Vector block_norms(const Vector& z, BlockPartition part);

/// Mixed l2/lp norm: the lp norm of the vector of per-block l2 norms.
double mixed_vector_norm(const Vector& z, BlockPartition part, MixedNorm p);

/// Upper bound on the induced (2,inf) block operator norm:
///   max_i sum_j spectral_norm(M_ij).
double mixed_operator_norm_upper(const Matrix& m, BlockPartition rows,
                                 BlockPartition cols);

/// Lower bound on the induced (2,inf) block operator norm. Every probe z has
/// all column blocks on the unit sphere (the extreme points of the unit
/// ball), and is refined by a few monotone block-ascent steps on the best
/// row block. Deterministic in `seed`.
double mixed_operator_norm_lower(const Matrix& m, BlockPartition rows,
                                 BlockPartition cols, std::size_t trials,
                                 std::uint64_t seed);

/// sqrt(lambda_max(X^T X)).
double spectral_norm(const Matrix& x);

/// Relative threshold on the triangular factor's diagonal below which a
/// column counts as dependent.
inline constexpr double kRankTolerance = 1e-12;

/// argmin_x ||y - B x||_2 via Householder QR. Throws RankDeficientError with
/// the offending column index when B is numerically rank deficient.
Vector least_squares(const Matrix& b, const Vector& y);
Matrix least_squares(const Matrix& b, const Matrix& y);

/// P_B y. The empty (zero-column) B projects everything to zero.
Vector project_onto_range(const Matrix& b, const Vector& y);

/// y - P_B y.
Vector project_onto_nullspace(const Matrix& b, const Vector& y);

/// Horizontal concatenation of the listed column blocks of `a`, in list
/// order.
Matrix gather_column_blocks(const Matrix& a, BlockPartition cols,
                            std::span<const Index> blocks);

}  // namespace bomp
