#include "bomp/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bomp/error.hpp"

namespace bomp {

namespace {

double as_real(Index v) { return static_cast<double>(v); }

void require_counts(Index k, Index d) {
  if (k < 1 || d < 1) throw std::invalid_argument("certificate needs K >= 1 and d >= 1");
}

// lhs >= rhs up to slack.
InequalityCheck at_least(std::string label, double lhs, double rhs, bool asserted) {
  return {std::move(label), lhs, rhs, asserted, lhs >= rhs - kInequalitySlack};
}

// lhs <= rhs up to slack.
InequalityCheck at_most(std::string label, double lhs, double rhs, bool asserted) {
  return {std::move(label), lhs, rhs, asserted, lhs <= rhs + kInequalitySlack};
}

bool all_asserted_hold(const std::vector<InequalityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const InequalityCheck& c) { return !c.asserted || c.holds; });
}

// (1 - 2x)^2 / (1 - x) with x = K d mu.
double omp_style_lhs(double x) { return (1.0 - 2.0 * x) * (1.0 - 2.0 * x) / (1.0 - x); }

}  // namespace

NoiseDecomposition decompose_noise(const BlockDictionary& dict,
                                   const BlockSparseSignal& signal, const Vector& w) {
  if (w.size() != dict.rows()) throw PartitionError("noise length must equal m");
  if (signal.partition() != dict.partition()) {
    throw PartitionError("signal partition does not match dictionary");
  }
  if (signal.support().empty()) throw std::invalid_argument("signal support is empty");

  const Index d = dict.block_size();
  const Matrix a_nz = dict.gather(signal.support().indices());
  const Vector noise_coef = least_squares(a_nz, w);

  NoiseDecomposition out;
  out.x_tilde_nz = signal.nonzero_part() + noise_coef;
  out.w_tilde = w - a_nz * noise_coef;

  const Vector corr = dict.matrix().transpose() * out.w_tilde;
  const Vector block_corr = block_norms(corr, dict.partition());
  out.omega = block_corr.maxCoeff();
  out.inf_noise_corr = corr.cwiseAbs().maxCoeff();
  for (Index l : signal.support().complement()) {
    out.omega_off_support = std::max(out.omega_off_support, block_corr(l));
  }

  out.x_block_min = std::numeric_limits<double>::infinity();
  for (Index q = 0; q < signal.sparsity(); ++q) {
    out.x_block_min = std::min(out.x_block_min, out.x_tilde_nz.segment(q * d, d).norm());
  }
  if (!(out.x_block_min > 0.0)) {
    throw std::invalid_argument("effective signal has a zero block inside the support");
  }

  out.dense = true;
  out.x_min = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < out.x_tilde_nz.size(); ++i) {
    const double v = std::abs(out.x_tilde_nz(i));
    if (v == 0.0) {
      out.dense = false;
    } else {
      out.x_min = std::min(out.x_min, v);
    }
  }
  return out;
}

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::noiseless_block:
      return "noiseless_block";
    case CertificateKind::theorem1:
      return "theorem1";
    case CertificateKind::omp_tropp:
      return "omp_tropp";
    case CertificateKind::bomp_orthonormal:
      return "bomp_orthonormal";
  }
  return "unknown";
}

RecoveryCertificate check_noiseless(double mu_block, double nu, Index k, Index d) {
  require_counts(k, d);
  RecoveryCertificate c;
  c.kind = CertificateKind::noiseless_block;
  const double base = 1.0 - as_real(d - 1) * nu;
  const double denom = base - as_real(k - 1) * as_real(d) * mu_block;
  c.condition_i_margin = base - as_real(2 * k - 1) * as_real(d) * mu_block;
  c.condition_ii_lhs = 1.0;
  c.condition_ii_rhs = 0.0;
  c.verdict = c.condition_i_margin > 0.0 && denom > 0.0;
  c.inputs = {mu_block, nu, k, d, 0.0, 0.0};
  return c;
}

RecoveryCertificate check_theorem1(double mu_block, double nu, Index k, Index d,
                                   double omega, double x_block_min) {
  require_counts(k, d);
  if (!(x_block_min > 0.0)) throw std::invalid_argument("x_b,min must be positive");
  if (!(omega >= 0.0)) throw std::invalid_argument("omega must be nonnegative");
  RecoveryCertificate c;
  c.kind = CertificateKind::theorem1;
  const double base = 1.0 - as_real(d - 1) * nu;
  const double denom = base - as_real(k - 1) * as_real(d) * mu_block;
  c.condition_i_margin = base - as_real(2 * k - 1) * as_real(d) * mu_block;
  c.condition_ii_lhs = c.condition_i_margin * c.condition_i_margin / denom;
  c.condition_ii_rhs = omega / x_block_min;
  c.verdict = c.condition_i_margin > 0.0 && c.condition_ii_lhs > c.condition_ii_rhs;
  c.inputs = {mu_block, nu, k, d, omega, x_block_min};
  return c;
}

RecoveryCertificate check_omp_tropp(double mu, Index k, Index d, double inf_noise_corr,
                                    double x_min) {
  require_counts(k, d);
  if (!(x_min > 0.0)) throw std::invalid_argument("x_min must be positive");
  RecoveryCertificate c;
  c.kind = CertificateKind::omp_tropp;
  const double kd = as_real(k) * as_real(d);
  c.condition_i_margin = 1.0 - 2.0 * kd * mu;
  c.condition_ii_lhs = c.condition_i_margin * c.condition_i_margin / (1.0 - kd * mu);
  c.condition_ii_rhs = inf_noise_corr / x_min;
  c.verdict = c.condition_i_margin > 0.0 && c.condition_ii_lhs > c.condition_ii_rhs;
  c.inputs = {mu, 0.0, k, d, inf_noise_corr, x_min};
  return c;
}

RecoveryCertificate check_bomp_orthonormal(double mu_block, Index k, Index d,
                                           double omega, double x_block_min) {
  RecoveryCertificate c = check_theorem1(mu_block, 0.0, k, d, omega, x_block_min);
  c.kind = CertificateKind::bomp_orthonormal;
  return c;
}

bool ComparisonChainReport::all_hold() const { return all_asserted_hold(checks); }

ComparisonChainReport check_comparison_chain(const BlockDictionary& dict,
                                             const BlockSparseSignal& signal,
                                             const Vector& w) {
  if (sub_coherence(dict) > 1e-10) {
    throw std::invalid_argument("comparison chain requires orthonormal blocks");
  }
  const NoiseDecomposition nd = decompose_noise(dict, signal, w);
  const Index k = signal.sparsity();
  const double d = as_real(dict.block_size());
  const double sqrt_d = std::sqrt(d);

  ComparisonChainReport r;
  r.mu = coherence(dict);
  r.mu_block = block_coherence(dict);
  r.omega = nd.omega;
  r.inf_noise_corr = nd.inf_noise_corr;
  r.x_block_min = nd.x_block_min;
  r.x_min = nd.x_min;
  r.dense_blocks = nd.dense;

  const double kd_mub = as_real(k) * d * r.mu_block;
  const double kd_mu = as_real(k) * d * r.mu;
  r.bomp_lhs = std::pow(1.0 - as_real(2 * k - 1) * d * r.mu_block, 2) /
               (1.0 - as_real(k - 1) * d * r.mu_block);
  r.bomp_relaxed = omp_style_lhs(kd_mub);
  r.omp_lhs = omp_style_lhs(kd_mu);
  r.omp_ratio = nd.inf_noise_corr / nd.x_min;
  r.bomp_ratio = nd.omega / nd.x_block_min;

  r.checks.push_back(at_most("omega <= sqrt(d) * inf_noise_corr", nd.omega,
                             sqrt_d * nd.inf_noise_corr, true));
  r.checks.push_back(at_least("x_b,min >= x_min", nd.x_block_min, nd.x_min, true));
  r.checks.push_back(
      at_least("x_b,min >= sqrt(d) * x_min", nd.x_block_min, sqrt_d * nd.x_min, nd.dense));
  r.checks.push_back(at_least("omp_ratio >= bomp_ratio", r.omp_ratio, r.bomp_ratio, nd.dense));
  r.checks.push_back(at_least("bomp_lhs >= bomp_relaxed", r.bomp_lhs, r.bomp_relaxed,
                              1.0 - 2.0 * kd_mub > 0.0));
  r.checks.push_back(at_least("bomp_relaxed >= omp_lhs", r.bomp_relaxed, r.omp_lhs,
                              1.0 - 2.0 * kd_mu > 0.0));
  r.checks.push_back(at_most("mu_block <= mu", r.mu_block, r.mu, true));
  return r;
}

bool AppendixBoundsReport::all_hold() const { return all_asserted_hold(checks); }

const InequalityCheck* AppendixBoundsReport::first_violation() const {
  for (const InequalityCheck& c : checks) {
    if (c.asserted && !c.holds) return &c;
  }
  return nullptr;
}

AppendixBoundsReport check_appendix_bounds(const BlockDictionary& dict,
                                           const CoherenceProfile& profile,
                                           const BlockSparseSignal& signal,
                                           const Vector& w, Index k,
                                           std::vector<Index> order,
                                           const AppendixOptions& options) {
  const Index big_k = signal.sparsity();
  if (k < 0 || k >= big_k) throw std::invalid_argument("appendix bounds need 0 <= k < K");
  {
    std::vector<Index> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != signal.support().indices()) {
      throw std::invalid_argument("split order must be a permutation of the support");
    }
  }

  const NoiseDecomposition nd = decompose_noise(dict, signal, w);
  const Index d = dict.block_size();
  const double dd = as_real(d);
  const double mu_b = profile.mu_block;
  const double base = 1.0 - (dd - 1.0) * profile.nu;

  // x~ blocks keyed by support position (support is sorted).
  const auto& support = signal.support().indices();
  auto tilde_block = [&](Index block) {
    const auto pos = std::lower_bound(support.begin(), support.end(), block) - support.begin();
    return nd.x_tilde_nz.segment(static_cast<Index>(pos) * d, d);
  };

  const std::vector<Index> phi1_blocks(order.begin(), order.begin() + k);
  const std::vector<Index> phi2_blocks(order.begin() + k, order.end());
  const Matrix phi1 = dict.gather(phi1_blocks);
  const Matrix phi2 = dict.gather(phi2_blocks);
  Vector phi2_coef(phi2.cols());
  double max_remaining = 0.0;
  for (std::size_t j = 0; j < phi2_blocks.size(); ++j) {
    phi2_coef.segment(static_cast<Index>(j) * d, d) = tilde_block(phi2_blocks[j]);
    max_remaining = std::max(max_remaining, tilde_block(phi2_blocks[j]).norm());
  }
  const Vector target = phi2 * phi2_coef;
  const Vector projected = project_onto_range(phi1, target);
  const Vector r_tilde = target - projected;

  auto max_block_corr = [&](const std::vector<Index>& blocks, const Vector& v) {
    double best = 0.0;
    for (Index l : blocks) best = std::max(best, (dict.block(l).transpose() * v).norm());
    return best;
  };

  AppendixBoundsReport report;
  report.k = k;
  report.sparsity = big_k;
  report.order = order;
  report.margin = base - as_real(2 * big_k - 1) * dd * mu_b;
  report.conditioned = report.margin > 0.0;
  const bool on = report.conditioned;

  report.checks.push_back(at_least(
      "a", max_block_corr(support, r_tilde),
      (base - as_real(2 * big_k - 2 * k - 1) * dd * mu_b) * nd.x_block_min, on));
  report.checks.push_back(at_most("b", max_block_corr(support, projected),
                                  dd * mu_b * as_real(big_k - k) * max_remaining, on));
  report.checks.push_back(at_least("c", max_block_corr(phi1_blocks, projected),
                                   max_block_corr(phi2_blocks, projected), on));

  const double lemma_denom = base - as_real(big_k - 1) * dd * mu_b;
  const std::vector<Index> zero_blocks = signal.support().complement();
  double sampled = 0.0;
  if (!zero_blocks.empty()) {
    const Matrix a_nz = dict.gather(support);
    const Matrix a_z = dict.gather(zero_blocks);
    // (A_nz^+ A_z)^T = A_z^T (A_nz^+)^T.
    const Matrix m = least_squares(a_nz, a_z).transpose();
    const BlockPartition rows(d, static_cast<Index>(zero_blocks.size()));
    const BlockPartition cols(d, big_k);
    sampled = mixed_operator_norm_lower(m, rows, cols, options.operator_norm_trials,
                                        options.operator_norm_seed);
    report.operator_norm_upper = mixed_operator_norm_upper(m, rows, cols);
  }
  report.checks.push_back(at_most("d", sampled, as_real(big_k) * dd * mu_b / lemma_denom,
                                  on && lemma_denom > 0.0));

  const double e_lhs = base - as_real(k - 1) * dd * mu_b;
  const double e_rhs = as_real(k) * dd * mu_b;
  report.checks.push_back({"e", e_lhs, e_rhs, on, e_lhs - e_rhs > -kInequalitySlack});
  return report;
}

AppendixBoundsReport check_appendix_bounds(const BlockDictionary& dict,
                                           const BlockSparseSignal& signal,
                                           const Vector& w, Index k,
                                           const AppendixOptions& options) {
  return check_appendix_bounds(dict, coherence_profile(dict), signal, w, k,
                               signal.support().indices(), options);
}

}  // namespace bomp
