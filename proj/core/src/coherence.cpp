#include "bomp/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "bomp/error.hpp"

namespace bomp {

namespace {

Matrix gram(const Matrix& a) {
  Matrix g(a.cols(), a.cols());
  g.setZero();
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

bool pair_less(Index i1, Index j1, Index i2, Index j2) {
  return std::tie(i1, j1) < std::tie(i2, j2);
}

}  // namespace

BlockDictionary::BlockDictionary(Matrix a, Index block_size)
    : a_(std::move(a)), part_(BlockPartition::of_length(a_.cols(), block_size)) {
  if (a_.rows() < 1) throw PartitionError("dictionary needs at least one row");
  if (!a_.allFinite()) throw std::invalid_argument("dictionary has non-finite entries");
  for (Index j = 0; j < a_.cols(); ++j) {
    const double norm = a_.col(j).norm();
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw std::invalid_argument("dictionary column " + std::to_string(j) +
                                  " has norm " + std::to_string(norm) +
                                  ", expected 1");
    }
  }
}

Matrix BlockDictionary::gather(std::span<const Index> blocks) const {
  return gather_column_blocks(a_, part_, blocks);
}

BlockDictionary BlockDictionary::repartitioned(Index block_size) const {
  return BlockDictionary(a_, block_size);
}

PairMaximum coherence_pair(const BlockDictionary& dict) {
  if (dict.cols() < 2) throw DegenerateError("coherence needs at least two columns");
  const Matrix g = gram(dict.matrix());
  PairMaximum best{-1.0, -1, -1};
  for (Index j = 1; j < g.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      const double v = std::abs(g(i, j));
      if (v > best.value || (v == best.value && pair_less(i, j, best.first, best.second))) {
        best = {v, i, j};
      }
    }
  }
  return best;
}

double coherence(const BlockDictionary& dict) { return coherence_pair(dict).value; }

PairMaximum block_coherence_pair(const BlockDictionary& dict) {
  const Index blocks = dict.block_count();
  const Index d = dict.block_size();
  if (blocks < 2) throw DegenerateError("block coherence needs at least two blocks");

  const Matrix g = gram(dict.matrix());
  struct Candidate {
    double frobenius;
    Index i;
    Index j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(blocks * (blocks - 1) / 2));
  for (Index i = 0; i < blocks; ++i) {
    for (Index j = i + 1; j < blocks; ++j) {
      candidates.push_back({g.block(i * d, j * d, d, d).norm(), i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.frobenius > b.frobenius;
                   });

  PairMaximum best{-1.0, -1, -1};
  for (const Candidate& c : candidates) {
    if (c.frobenius < best.value) break;
    const double rho = spectral_norm(g.block(c.i * d, c.j * d, d, d));
    if (rho > best.value ||
        (rho == best.value && pair_less(c.i, c.j, best.first, best.second))) {
      best = {rho, c.i, c.j};
    }
  }
  best.value /= static_cast<double>(d);
  return best;
}

double block_coherence(const BlockDictionary& dict) {
  return block_coherence_pair(dict).value;
}

PairMaximum sub_coherence_pair(const BlockDictionary& dict) {
  const Index d = dict.block_size();
  PairMaximum best{0.0, -1, -1};
  if (d == 1) return best;
  bool found = false;
  for (Index l = 0; l < dict.block_count(); ++l) {
    const Matrix g = dict.block(l).transpose() * dict.block(l);
    for (Index j = 1; j < d; ++j) {
      for (Index i = 0; i < j; ++i) {
        const double v = std::abs(g(i, j));
        if (!found || v > best.value) {
          best = {v, l * d + i, l * d + j};
          found = true;
        }
      }
    }
  }
  return best;
}

double sub_coherence(const BlockDictionary& dict) {
  return sub_coherence_pair(dict).value;
}

double gershgorin_gram_floor(const BlockDictionary& dict) {
  return 1.0 - static_cast<double>(dict.block_size() - 1) * sub_coherence(dict);
}

CoherenceProfile coherence_profile(const BlockDictionary& dict) {
  CoherenceProfile p;
  p.mu_pair = coherence_pair(dict);
  p.mu_block_pair = block_coherence_pair(dict);
  p.nu_pair = sub_coherence_pair(dict);
  p.mu = p.mu_pair.value;
  p.mu_block = p.mu_block_pair.value;
  p.nu = p.nu_pair.value;
  p.gershgorin_floor = 1.0 - static_cast<double>(dict.block_size() - 1) * p.nu;
  return p;
}

OrthogonalizedDictionary orthogonalize_blocks(const BlockDictionary& dict) {
  const Index m = dict.rows();
  const Index d = dict.block_size();
  if (m < d) {
    throw RankDeficientError("orthogonalize_blocks: block size exceeds row count", 0);
  }

  Matrix q_all(m, dict.cols());
  Matrix v = Matrix::Zero(dict.cols(), dict.cols());
  for (Index l = 0; l < dict.block_count(); ++l) {
    Eigen::HouseholderQR<Matrix> qr(Matrix(dict.block(l)));
    Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    Matrix q = qr.householderQ() * Matrix::Identity(m, d);

    const double largest = r.diagonal().cwiseAbs().maxCoeff();
    for (Index j = 0; j < d; ++j) {
      if (!(std::abs(r(j, j)) >= kRankTolerance * largest) || largest == 0.0) {
        throw RankDeficientError(
            "orthogonalize_blocks: block " + std::to_string(l) + " is rank deficient", l);
      }
      if (r(j, j) < 0.0) {
        r.row(j) *= -1.0;
        q.col(j) *= -1.0;
      }
    }
    q_all.middleCols(l * d, d) = q;
    v.block(l * d, l * d, d, d) = r;
  }
  return {BlockDictionary(std::move(q_all), d), std::move(v)};
}

bool orthogonalization_advantage_applies(Index rows, Index block_size,
                                         Index block_count) {
  if (block_size < 1 || rows % block_size != 0) return false;
  const Index r = rows / block_size;
  if (block_count <= r) return false;
  // d > R L / (L - R), kept in integers.
  return block_size * (block_count - r) > r * block_count;
}

}  // namespace bomp
