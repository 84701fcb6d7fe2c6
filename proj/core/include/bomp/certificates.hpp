#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bomp/coherence.hpp"
#include "bomp/recovery.hpp"

namespace bomp {

/// Slack added to every checked proof inequality. It absorbs floating-point
/// evaluation error only; certificate verdicts themselves use the strict
/// inequalities without slack.
inline constexpr double kInequalitySlack = 1e-10;

/// Split of the measurement noise relative to the true-support subspace:
///   y = A_nz x~_nz + w~,  x~_nz = x_nz + A_nz^+ w,  w~ = (I - P_{A_nz}) w.
struct NoiseDecomposition {
  Vector x_tilde_nz;        // Kd, blocks in support order
  Vector w_tilde;           // m
  double omega = 0.0;       // max over all L blocks of ||A_l^T w~||_2
  double omega_off_support = 0.0;  // same maximum restricted to zero blocks
  double x_block_min = 0.0;        // min over support of ||x~_l||_2
  double inf_noise_corr = 0.0;     // ||A^T w~||_inf (single columns)
  double x_min = 0.0;              // min nonzero |entry| of x~_nz
  bool dense = false;              // every entry of x~_nz is nonzero
};

NoiseDecomposition decompose_noise(const BlockDictionary& dict,
                                   const BlockSparseSignal& signal, const Vector& w);

enum class CertificateKind { noiseless_block, theorem1, omp_tropp, bomp_orthonormal };

std::string_view to_string(CertificateKind kind);

struct CertificateInputs {
  double coherence = 0.0;  // mu_B for block kinds, mu for omp_tropp
  double nu = 0.0;
  Index k = 0;
  Index d = 0;
  double noise_corr = 0.0;  // omega, or ||A^T w~||_inf for omp_tropp
  double signal_min = 0.0;  // x_b,min, or x_min for omp_tropp
};

struct RecoveryCertificate {
  CertificateKind kind = CertificateKind::noiseless_block;
  double condition_i_margin = 0.0;
  double condition_ii_lhs = 0.0;
  double condition_ii_rhs = 0.0;
  bool verdict = false;
  CertificateInputs inputs;
};

/// Block recovery from exact measurements:
///   margin = 1 - (d-1) nu - (2K-1) d mu_B, verdict = margin > 0, and the
/// fraction form K d mu_B / (1 - (d-1) nu - (K-1) d mu_B) < 1 agrees.
/// Condition (ii) is vacuous and recorded as lhs = 1, rhs = 0.
RecoveryCertificate check_noiseless(double mu_block, double nu, Index k, Index d);

/// Noisy block recovery: (i) margin > 0 and
/// (ii) margin^2 / (1 - (d-1) nu - (K-1) d mu_B) > omega / x_b,min.
/// The left side of (ii) is below one whenever (i) holds, so
/// omega >= x_b,min can never certify.
RecoveryCertificate check_theorem1(double mu_block, double nu, Index k, Index d,
                                   double omega, double x_block_min);

/// Atom-level OMP recovery of a K d-sparse vector:
/// (i) 1 - 2 K d mu > 0, (ii) (1 - 2Kd mu)^2 / (1 - Kd mu) > corr / x_min.
RecoveryCertificate check_omp_tropp(double mu, Index k, Index d, double inf_noise_corr,
                                    double x_min);

/// check_theorem1 specialised to orthonormal blocks (nu = 0).
RecoveryCertificate check_bomp_orthonormal(double mu_block, Index k, Index d,
                                           double omega, double x_block_min);

/// One evaluated inequality `lhs >= rhs` (or `lhs <= rhs`), with slack.
struct InequalityCheck {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  bool asserted = true;  // false: reported for diagnostics only
  bool holds = true;
};

struct ComparisonChainReport {
  double mu = 0.0;
  double mu_block = 0.0;
  double omega = 0.0;
  double inf_noise_corr = 0.0;
  double x_block_min = 0.0;
  double x_min = 0.0;
  bool dense_blocks = false;
  double bomp_lhs = 0.0;       // [1-(2K-1)d mu_B]^2 / (1-(K-1)d mu_B)
  double bomp_relaxed = 0.0;   // (1-2Kd mu_B)^2 / (1-Kd mu_B)
  double omp_lhs = 0.0;        // (1-2Kd mu)^2 / (1-Kd mu)
  double omp_ratio = 0.0;      // ||A^T w~||_inf / x_min
  double bomp_ratio = 0.0;     // omega / x_b,min
  std::vector<InequalityCheck> checks;

  bool all_hold() const;
};

/// Evaluates the chain comparing the orthonormal-block BOMP condition with
/// the OMP condition. Requires orthonormal blocks (nu <= 1e-10); throws
/// std::invalid_argument otherwise.
///
/// Always asserted: omega <= sqrt(d) ||A^T w~||_inf and x_b,min >= x_min.
/// x_b,min >= sqrt(d) x_min (and hence the ratio ordering) is asserted only
/// when every entry of x~_nz is nonzero; otherwise it is reported.
/// The coherence links are asserted when 1 - 2Kd mu_B > 0 (resp. mu).
ComparisonChainReport check_comparison_chain(const BlockDictionary& dict,
                                             const BlockSparseSignal& signal,
                                             const Vector& w);

struct AppendixBoundsReport {
  Index k = 0;
  Index sparsity = 0;
  std::vector<Index> order;  // support order used for the Phi1 / Phi2 split
  double margin = 0.0;       // 1 - (d-1) nu - (2K-1) d mu_B
  bool conditioned = false;  // margin > 0; inequalities only asserted then
  double operator_norm_upper = 0.0;  // diagnostic, for (d)
  std::vector<InequalityCheck> checks;  // labels "a".."e"

  bool all_hold() const;
  /// First asserted failing check, or nullptr.
  const InequalityCheck* first_violation() const;
};

struct AppendixOptions {
  std::size_t operator_norm_trials = 64;
  std::uint64_t operator_norm_seed = 0x5eed;
};

/// Proof-chain inequalities after k correct selections, with Phi1 the first k
/// blocks of `order` (a permutation of the support) and Phi2 the rest:
///   (a) ||A_nz^T r~_k||_{2,inf} >= (1-(d-1)nu-(2K-2k-1)d mu_B) x_b,min
///   (b) ||A_nz^T P1 Phi2 phi2||_{2,inf} <= d mu_B (K-k) max_{Phi2} ||x~_i||
///   (c) max_{Phi1} ||A_i^T P1 Phi2 phi2|| >= max_{Phi2} ||A_i^T P1 Phi2 phi2||
///   (d) ||A_z^T (A_nz^+)^T||_{2,inf} (sampled lower bound)
///           <= K d mu_B / (1-(d-1)nu-(K-1)d mu_B)
///   (e) 1-(d-1)nu-(k-1)d mu_B > k d mu_B
/// where r~_k = Phi2 phi2 - P1 Phi2 phi2. Everything is evaluated; the
/// checks are asserted only when the margin is positive (and, for (d), the
/// denominator too). `profile` must belong to `dict`.
AppendixBoundsReport check_appendix_bounds(const BlockDictionary& dict,
                                           const CoherenceProfile& profile,
                                           const BlockSparseSignal& signal,
                                           const Vector& w, Index k,
                                           std::vector<Index> order,
                                           const AppendixOptions& options = {});

/// Support split in increasing index order; coherence computed here.
AppendixBoundsReport check_appendix_bounds(const BlockDictionary& dict,
                                           const BlockSparseSignal& signal,
                                           const Vector& w, Index k,
                                           const AppendixOptions& options = {});

}  // namespace bomp
