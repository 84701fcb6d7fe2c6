#include "bomp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bomp/error.hpp"
#include "bomp/rng.hpp"

namespace bomp {

namespace {

void require_dim(Index actual, Index expected, const char* what) {
  if (actual != expected) {
    throw PartitionError(std::string(what) + ": expected dimension " +
                         std::to_string(expected) + ", got " +
                         std::to_string(actual));
  }
}

// Block ascent steps applied to each random probe in the lower estimator.
constexpr int kAscentSteps = 6;

double row_block_max(const Vector& v, BlockPartition rows, Index* argmax) {
  double best = 0.0;
  *argmax = 0;
  for (Index i = 0; i < rows.count; ++i) {
    const double norm = v.segment(rows.offset(i), rows.size).norm();
    if (norm > best) {
      best = norm;
      *argmax = i;
    }
  }
  return best;
}

void check_rank(const Matrix& qr, Index cols) {
  const Index k = std::min(qr.rows(), cols);
  double largest = 0.0;
  for (Index j = 0; j < k; ++j) largest = std::max(largest, std::abs(qr(j, j)));
  if (cols > qr.rows()) {
    throw RankDeficientError(
        "least_squares: more columns than rows, column " +
            std::to_string(qr.rows()) + " is dependent",
        qr.rows());
  }
  for (Index j = 0; j < k; ++j) {
    if (!(std::abs(qr(j, j)) >= kRankTolerance * largest) || largest == 0.0) {
      throw RankDeficientError(
          "least_squares: rank deficient at column " + std::to_string(j), j);
    }
  }
}

}  // namespace

BlockPartition::BlockPartition(Index block_size, Index block_count)
    : size(block_size), count(block_count) {
  if (size < 1 || count < 1) {
    throw PartitionError("block partition needs size >= 1 and count >= 1");
  }
}

BlockPartition BlockPartition::of_length(Index dim, Index block_size) {
  if (block_size < 1 || dim < 1 || dim % block_size != 0) {
    throw PartitionError("block size " + std::to_string(block_size) +
                         " does not divide dimension " + std::to_string(dim));
  }
  return {block_size, dim / block_size};
}

Vector block_norms(const Vector& z, BlockPartition part) {
  require_dim(z.size(), part.dim(), "block_norms");
  Vector out(part.count);
  for (Index q = 0; q < part.count; ++q) {
    out(q) = z.segment(part.offset(q), part.size).norm();
  }
  return out;
}

double mixed_vector_norm(const Vector& z, BlockPartition part, MixedNorm p) {
  const Vector v = block_norms(z, part);
  switch (p) {
    case MixedNorm::one:
      return v.sum();
    case MixedNorm::two:
      return v.norm();
    case MixedNorm::inf:
      return v.maxCoeff();
  }
  return 0.0;
}

double mixed_operator_norm_upper(const Matrix& m, BlockPartition rows,
                                 BlockPartition cols) {
  require_dim(m.rows(), rows.dim(), "mixed_operator_norm_upper rows");
  require_dim(m.cols(), cols.dim(), "mixed_operator_norm_upper cols");
  double best = 0.0;
  for (Index i = 0; i < rows.count; ++i) {
    double sum = 0.0;
    for (Index j = 0; j < cols.count; ++j) {
      sum += spectral_norm(
          m.block(rows.offset(i), cols.offset(j), rows.size, cols.size));
    }
    best = std::max(best, sum);
  }
  return best;
}

double mixed_operator_norm_lower(const Matrix& m, BlockPartition rows,
                                 BlockPartition cols, std::size_t trials,
                                 std::uint64_t seed) {
  require_dim(m.rows(), rows.dim(), "mixed_operator_norm_lower rows");
  require_dim(m.cols(), cols.dim(), "mixed_operator_norm_lower cols");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  Rng rng(seed);
  Vector z(cols.dim());
  double best = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (Index j = 0; j < cols.count; ++j) {
      auto block = z.segment(cols.offset(j), cols.size);
      double norm = 0.0;
      while (norm == 0.0) {
        for (Index e = 0; e < cols.size; ++e) block(e) = rng.normal();
        norm = block.norm();
      }
      block /= norm;
    }

    Index row = 0;
    best = std::max(best, row_block_max(m * z, rows, &row));

    // Maximize ||M_row z|| over the product of spheres by re-aligning each
    // column block with the gradient; never decreases the objective.
    const auto m_row = m.middleRows(rows.offset(row), rows.size);
    for (int step = 0; step < kAscentSteps; ++step) {
      const Vector grad = m_row.transpose() * (m_row * z);
      for (Index j = 0; j < cols.count; ++j) {
        const auto g = grad.segment(cols.offset(j), cols.size);
        const double norm = g.norm();
        if (norm > 0.0) z.segment(cols.offset(j), cols.size) = g / norm;
      }
      Index ignored = 0;
      best = std::max(best, row_block_max(m * z, rows, &ignored));
    }
  }
  return best;
}

double spectral_norm(const Matrix& x) {
  if (x.size() == 0) throw PartitionError("spectral_norm of empty matrix");
  if (x.size() == 1) return std::abs(x(0, 0));
  if (x.rows() == 1 || x.cols() == 1) return x.norm();

  const Matrix gram =
      x.cols() <= x.rows() ? Matrix(x.transpose() * x) : Matrix(x * x.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

Vector least_squares(const Matrix& b, const Vector& y) {
  require_dim(y.size(), b.rows(), "least_squares");
  if (b.cols() == 0) return Vector(0);
  Eigen::HouseholderQR<Matrix> qr(b);
  check_rank(qr.matrixQR(), b.cols());
  return qr.solve(y);
}

Matrix least_squares(const Matrix& b, const Matrix& y) {
  require_dim(y.rows(), b.rows(), "least_squares");
  if (b.cols() == 0) return Matrix(0, y.cols());
  Eigen::HouseholderQR<Matrix> qr(b);
  check_rank(qr.matrixQR(), b.cols());
  return qr.solve(y);
}

Vector project_onto_range(const Matrix& b, const Vector& y) {
  require_dim(y.size(), b.rows(), "project_onto_range");
  if (b.cols() == 0) return Vector::Zero(y.size());
  return b * least_squares(b, y);
}

Vector project_onto_nullspace(const Matrix& b, const Vector& y) {
  return y - project_onto_range(b, y);
}

Matrix gather_column_blocks(const Matrix& a, BlockPartition cols,
                            std::span<const Index> blocks) {
  require_dim(a.cols(), cols.dim(), "gather_column_blocks");
  Matrix out(a.rows(), static_cast<Index>(blocks.size()) * cols.size);
  Index at = 0;
  for (Index l : blocks) {
    if (l < 0 || l >= cols.count) {
      throw PartitionError("block index " + std::to_string(l) + " out of range");
    }
    out.middleCols(at, cols.size) = a.middleCols(cols.offset(l), cols.size);
    at += cols.size;
  }
  return out;
}

}  // namespace bomp
