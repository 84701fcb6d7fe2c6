#include "bomp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bomp/error.hpp"

namespace bomp {

namespace {

constexpr double kDegenerateCorrelation = 1e-14;
constexpr double kStagnationRelative = 1e-14;

// Both maxima of the greedy ratio, without the degeneracy check.
std::pair<double, double> support_split_maxima(const Vector& correlations,
                                               const BlockSupport& support) {
  double on = 0.0;
  double off = 0.0;
  for (Index l = 0; l < correlations.size(); ++l) {
    double& slot = support.contains(l) ? on : off;
    slot = std::max(slot, correlations(l));
  }
  return {off, on};
}

void check_support(const BlockDictionary& dict, const BlockSupport& support) {
  if (support.block_count() != dict.block_count()) {
    throw PartitionError("support block count does not match dictionary");
  }
}

}  // namespace

BlockSupport::BlockSupport(std::vector<Index> indices, Index block_count)
    : indices_(std::move(indices)), block_count_(block_count) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("block support has duplicate indices");
  }
  if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= block_count)) {
    throw std::invalid_argument("block support index out of range");
  }
}

bool BlockSupport::contains(Index block) const {
  return std::binary_search(indices_.begin(), indices_.end(), block);
}

std::vector<Index> BlockSupport::complement() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(block_count_ - size()));
  for (Index l = 0; l < block_count_; ++l) {
    if (!contains(l)) out.push_back(l);
  }
  return out;
}

BlockSparseSignal::BlockSparseSignal(Vector x, BlockPartition part, BlockSupport support)
    : x_(std::move(x)), part_(part), support_(std::move(support)) {
  if (x_.size() != part_.dim()) throw PartitionError("signal length does not match partition");
  if (support_.block_count() != part_.count) {
    throw PartitionError("support block count does not match partition");
  }
  for (Index l = 0; l < part_.count; ++l) {
    const bool nonzero = block(l).squaredNorm() > 0.0;
    if (nonzero != support_.contains(l)) {
      throw std::invalid_argument("signal block " + std::to_string(l) +
                                  (nonzero ? " is nonzero outside the support"
                                           : " is zero inside the support"));
    }
  }
}

BlockSparseSignal BlockSparseSignal::from_dense(Vector x, Index block_size) {
  const BlockPartition part = BlockPartition::of_length(x.size(), block_size);
  std::vector<Index> nonzero;
  for (Index l = 0; l < part.count; ++l) {
    if (x.segment(part.offset(l), part.size).squaredNorm() > 0.0) nonzero.push_back(l);
  }
  BlockSupport support(std::move(nonzero), part.count);
  return BlockSparseSignal(std::move(x), part, std::move(support));
}

Vector BlockSparseSignal::nonzero_part() const {
  Vector out(support_.size() * part_.size);
  Index at = 0;
  for (Index l : support_.indices()) {
    out.segment(at, part_.size) = block(l);
    at += part_.size;
  }
  return out;
}

StoppingRule StoppingRule::known_k(Index k) {
  StoppingRule rule;
  rule.mode = Mode::known_k;
  rule.k = k;
  rule.max_iters = k;
  return rule;
}

StoppingRule StoppingRule::residual_tol(double epsilon, Index max_iters) {
  StoppingRule rule;
  rule.mode = Mode::residual_tol;
  rule.epsilon = epsilon;
  rule.max_iters = max_iters;
  return rule;
}

void StoppingRule::validate(const BlockDictionary& dict) const {
  const Index cap = dict.rows() / dict.block_size();
  if (mode == Mode::known_k) {
    if (k < 1 || k > dict.block_count()) {
      throw std::invalid_argument("known_k: K must lie in [1, L]");
    }
    if (k > cap) throw std::invalid_argument("known_k: K exceeds floor(m/d)");
  } else {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("residual_tol: epsilon must be >= 0");
    if (max_iters < 0 || max_iters > std::min(cap, dict.block_count())) {
      throw std::invalid_argument("residual_tol: max_iters must lie in [0, min(L, floor(m/d))]");
    }
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::k_reached:
      return "k_reached";
    case StopReason::tol_reached:
      return "tol_reached";
    case StopReason::max_iters:
      return "max_iters";
    case StopReason::stagnation:
      return "stagnation";
  }
  return "unknown";
}

bool operator==(const RecoveryTrace& a, const RecoveryTrace& b) {
  return a.chosen == b.chosen && a.residual_norms == b.residual_norms &&
         a.gammas == b.gammas && a.estimate.size() == b.estimate.size() &&
         a.estimate == b.estimate && a.iterations == b.iterations &&
         a.stop_reason == b.stop_reason;
}

RecoveryTrace bomp(const Vector& y, const BlockDictionary& dict, const StoppingRule& stop,
                   const std::optional<BlockSupport>& oracle_support) {
  if (y.size() != dict.rows()) throw PartitionError("measurement length must equal m");
  stop.validate(dict);
  if (oracle_support) check_support(dict, *oracle_support);

  const BlockPartition part = dict.partition();
  const bool tolerance_mode = stop.mode == StoppingRule::Mode::residual_tol;
  const Index limit = tolerance_mode ? stop.max_iters : stop.k;

  RecoveryTrace trace;
  trace.estimate = Vector::Zero(dict.cols());
  trace.residual_norms.push_back(y.norm());

  Vector residual = y;
  Vector coefficients;
  std::vector<bool> taken(static_cast<std::size_t>(part.count), false);
  int stalled = 0;

  if (tolerance_mode && trace.residual_norms.back() < stop.epsilon) {
    trace.stop_reason = StopReason::tol_reached;
    return trace;
  }

  while (true) {
    if (trace.iterations == limit) {
      trace.stop_reason = tolerance_mode ? StopReason::max_iters : StopReason::k_reached;
      break;
    }
    const Index t = trace.iterations + 1;

    const Vector correlations = block_norms(dict.matrix().transpose() * residual, part);
    if (oracle_support) {
      const auto [off, on] = support_split_maxima(correlations, *oracle_support);
      trace.gammas.push_back(on < kDegenerateCorrelation
                                 ? std::numeric_limits<double>::infinity()
                                 : off / on);
    }

    Index pick = -1;
    for (Index l = 0; l < part.count; ++l) {
      if (taken[static_cast<std::size_t>(l)]) continue;
      if (pick < 0 || correlations(l) > correlations(pick)) pick = l;
    }
    taken[static_cast<std::size_t>(pick)] = true;
    trace.chosen.push_back(pick);

    const Matrix psi = dict.gather(trace.chosen);
    try {
      coefficients = least_squares(psi, y);
    } catch (const RankDeficientError& e) {
      throw RecoveryError("bomp iteration " + std::to_string(t) + ": " + e.what(), t);
    }
    residual = y - psi * coefficients;
    trace.iterations = t;

    const double previous = trace.residual_norms.back();
    const double current = residual.norm();
    trace.residual_norms.push_back(current);

    if (tolerance_mode) {
      if (current < stop.epsilon) {
        trace.stop_reason = StopReason::tol_reached;
        break;
      }
      stalled = (previous - current) <= kStagnationRelative * previous ? stalled + 1 : 0;
      if (stalled >= 2) {
        trace.stop_reason = StopReason::stagnation;
        break;
      }
    }
  }

  for (std::size_t s = 0; s < trace.chosen.size(); ++s) {
    trace.estimate.segment(part.offset(trace.chosen[s]), part.size) =
        coefficients.segment(static_cast<Index>(s) * part.size, part.size);
  }
  return trace;
}

RecoveryTrace omp(const Vector& y, const BlockDictionary& dict, const StoppingRule& stop) {
  const Index d = dict.block_size();
  StoppingRule atoms = stop;
  atoms.k = stop.k * d;
  atoms.max_iters = stop.max_iters * d;
  return bomp(y, dict.repartitioned(1), atoms);
}

double greedy_selection_ratio(const BlockDictionary& dict, const BlockSupport& support,
                              const Vector& r) {
  check_support(dict, support);
  if (r.size() != dict.rows()) throw PartitionError("residual length must equal m");
  if (support.empty() || support.size() >= dict.block_count()) {
    throw std::invalid_argument("greedy ratio needs a nonempty proper support");
  }
  const Vector correlations =
      block_norms(dict.matrix().transpose() * r, dict.partition());
  const auto [off, on] = support_split_maxima(correlations, support);
  if (on < kDegenerateCorrelation) {
    throw DegenerateResidualError("residual is orthogonal to every true-support block");
  }
  return off / on;
}

}  // namespace bomp
