#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bomp/certificates.hpp"
#include "bomp/error.hpp"
#include "bomp/experiments.hpp"
#include "support/oracles.hpp"

using namespace bomp;

namespace {

Vector random_vector(Index len, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> n01;
  Vector v(len);
  for (Index i = 0; i < len; ++i) v(i) = scale * n01(gen);
  return v;
}

// Tall dictionary with few blocks, so the coherence conditions can hold.
BlockDictionary tall_dictionary(Index m, Index blocks, Index d, std::uint64_t seed,
                                bool orthonormal) {
  BlockDictionary dict = gen_dictionary(m, blocks * d, d, seed);
  if (orthonormal) return orthogonalize_blocks(dict).dictionary;
  return dict;
}

}  // namespace

TEST(Noiseless, HandComputedExample) {
  const RecoveryCertificate c = check_noiseless(0.02, 0.05, 3, 4);
  EXPECT_NEAR(c.condition_i_margin, 0.45, 1e-15);
  EXPECT_TRUE(c.verdict);
  EXPECT_EQ(c.kind, CertificateKind::noiseless_block);
  EXPECT_EQ(c.condition_ii_lhs, 1.0);
  EXPECT_EQ(c.condition_ii_rhs, 0.0);
  // Fraction form, evaluated separately: 12 * 0.02 / (1 - 0.15 - 0.16).
  EXPECT_NEAR(0.24 / 0.69, 3 * 4 * 0.02 / (1.0 - 3 * 0.05 - 2 * 4 * 0.02), 1e-15);
  EXPECT_LT(0.24 / 0.69, 1.0);
}

TEST(Noiseless, OrthogonalBlocksAlwaysPass) {
  for (Index k = 1; k <= 50; ++k) EXPECT_TRUE(check_noiseless(0.0, 0.0, k, 4).verdict);
}

TEST(Noiseless, UnitBlocksThreshold) {
  for (Index k = 1; k <= 6; ++k) {
    const double threshold = 1.0 / static_cast<double>(2 * k - 1);
    EXPECT_TRUE(check_noiseless(threshold * 0.999, 0.0, k, 1).verdict);
    EXPECT_FALSE(check_noiseless(threshold * 1.001, 0.0, k, 1).verdict);
  }
  EXPECT_FALSE(check_noiseless(1.0 / 3.0 + 1e-9, 0.0, 2, 1).verdict);
}

TEST(Noiseless, FractionFormAgreesWithMargin) {
  int compared = 0;
  for (double mu_b = 0.0; mu_b <= 0.3; mu_b += 0.0071) {
    for (double nu = 0.0; nu <= 0.5; nu += 0.013) {
      for (Index k = 1; k <= 6; ++k) {
        for (Index d = 1; d <= 5; ++d) {
          const double base = 1.0 - static_cast<double>(d - 1) * nu;
          const double denom = base - static_cast<double>((k - 1) * d) * mu_b;
          if (!(denom > 0.0)) continue;
          const RecoveryCertificate c = check_noiseless(mu_b, nu, k, d);
          if (std::abs(c.condition_i_margin) < 1e-12) continue;  // exact boundary
          const double fraction = static_cast<double>(k * d) * mu_b / denom;
          EXPECT_EQ(fraction < 1.0, c.verdict) << mu_b << ' ' << nu << ' ' << k << ' ' << d;
          ++compared;
        }
      }
    }
  }
  EXPECT_GT(compared, 10000);
}

TEST(Theorem1, HandComputedExample) {
  const RecoveryCertificate c = check_theorem1(0.01, 0.0, 2, 4, 0.1, 1.0);
  EXPECT_NEAR(c.condition_i_margin, 0.88, 1e-15);
  EXPECT_NEAR(c.condition_ii_lhs, 0.7744 / 0.96, 1e-15);
  EXPECT_NEAR(c.condition_ii_lhs, 0.806667, 1e-6);
  EXPECT_NEAR(c.condition_ii_rhs, 0.1, 1e-15);
  EXPECT_TRUE(c.verdict);
}

TEST(Theorem1, NoiselessReducesToBlockCondition) {
  for (double mu_b = 0.0; mu_b <= 0.2; mu_b += 0.003) {
    for (double nu = 0.0; nu <= 0.3; nu += 0.02) {
      for (Index k = 1; k <= 5; ++k) {
        for (Index d = 1; d <= 4; ++d) {
          EXPECT_EQ(check_theorem1(mu_b, nu, k, d, 0.0, 0.7).verdict,
                    check_noiseless(mu_b, nu, k, d).verdict);
        }
      }
    }
  }
}

TEST(Theorem1, RatioOfOneNeverCertifies) {
  for (double mu_b = 0.0; mu_b <= 0.2; mu_b += 0.01) {
    for (double nu : {0.0, 0.1, 0.3}) {
      for (Index k = 1; k <= 4; ++k) {
        const RecoveryCertificate c = check_theorem1(mu_b, nu, k, 4, 0.8, 0.8);
        EXPECT_FALSE(c.verdict);
        if (c.condition_i_margin > 0.0) EXPECT_LT(c.condition_ii_lhs, 1.0 + 1e-15);
      }
    }
  }
}

TEST(Theorem1, RejectsBadInputs) {
  EXPECT_THROW(check_theorem1(0.1, 0.0, 1, 1, 0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(check_theorem1(0.1, 0.0, 1, 1, -0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(check_theorem1(0.1, 0.0, 0, 1, 0.1, 1.0), std::invalid_argument);
}

TEST(OmpTropp, HandComputedExample) {
  const RecoveryCertificate c = check_omp_tropp(0.01, 2, 4, 0.05, 0.5);
  EXPECT_NEAR(c.condition_i_margin, 0.84, 1e-15);
  EXPECT_NEAR(c.condition_ii_lhs, 0.7056 / 0.92, 1e-15);
  EXPECT_NEAR(c.condition_ii_lhs, 0.76696, 1e-5);
  EXPECT_NEAR(c.condition_ii_rhs, 0.1, 1e-15);
  EXPECT_TRUE(c.verdict);
}

TEST(OmpTropp, Boundary) {
  EXPECT_TRUE(check_omp_tropp(0.0624, 2, 4, 0.0, 1.0).verdict);
  const RecoveryCertificate edge = check_omp_tropp(1.0 / 16.0, 2, 4, 0.0, 1.0);
  EXPECT_EQ(edge.condition_i_margin, 0.0);
  EXPECT_FALSE(edge.verdict);
  EXPECT_THROW(check_omp_tropp(0.01, 1, 1, 0.0, 0.0), std::invalid_argument);
}

TEST(BompOrthonormal, IsTheoremOneWithoutSubCoherence) {
  const RecoveryCertificate a = check_bomp_orthonormal(0.03, 2, 3, 0.05, 0.9);
  const RecoveryCertificate b = check_theorem1(0.03, 0.0, 2, 3, 0.05, 0.9);
  EXPECT_EQ(a.kind, CertificateKind::bomp_orthonormal);
  EXPECT_EQ(a.condition_i_margin, b.condition_i_margin);
  EXPECT_EQ(a.condition_ii_lhs, b.condition_ii_lhs);
  EXPECT_EQ(a.verdict, b.verdict);
}

TEST(DecomposeNoise, ZeroNoise) {
  const BlockDictionary dict = gen_dictionary(30, 60, 3, 1);
  const BlockSparseSignal signal = gen_signal(20, 3, 3, 2);
  const NoiseDecomposition nd = decompose_noise(dict, signal, Vector::Zero(30));
  EXPECT_LE((nd.x_tilde_nz - signal.nonzero_part()).norm(), 1e-15);
  EXPECT_EQ(nd.w_tilde, Vector::Zero(30));
  EXPECT_EQ(nd.omega, 0.0);
  EXPECT_EQ(nd.inf_noise_corr, 0.0);
}

TEST(DecomposeNoise, NoiseInsideTheSignalSubspace) {
  const BlockDictionary dict = gen_dictionary(30, 60, 3, 3);
  const BlockSparseSignal signal = gen_signal(20, 3, 3, 4);
  std::mt19937_64 gen(5);
  const Matrix a_nz = dict.gather(signal.support().indices());
  const Vector c = random_vector(a_nz.cols(), gen, 0.1);
  const NoiseDecomposition nd = decompose_noise(dict, signal, a_nz * c);
  EXPECT_LE(nd.w_tilde.norm(), 1e-12);
  EXPECT_LE(nd.omega, 1e-12);
  EXPECT_LE((nd.x_tilde_nz - signal.nonzero_part() - c).norm(), 1e-12);
}

TEST(DecomposeNoise, MatchesPerBlockLoops) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const BlockDictionary dict = gen_dictionary(40, 400, 4, 100 + seed);
    const BlockSparseSignal signal = gen_signal(100, 4, 1 + static_cast<Index>(seed % 5), 200 + seed);
    const Vector w = gen_noise(40, 0.1, 300 + seed);
    const NoiseDecomposition nd = decompose_noise(dict, signal, w);
    const Matrix a_nz = dict.gather(signal.support().indices());
    const Vector y = dict.matrix() * signal.values() + w;
    EXPECT_LE((a_nz * nd.x_tilde_nz + nd.w_tilde - y).norm(), 1e-8 * y.norm());
    EXPECT_LE((a_nz.transpose() * nd.w_tilde).cwiseAbs().maxCoeff(), 1e-8);

    const auto a = oracle::to_mat(dict.matrix());
    double omega = 0.0, inf_corr = 0.0;
    for (std::size_t l = 0; l < 100; ++l) {
      double acc = 0.0;
      for (std::size_t e = 0; e < 4; ++e) {
        double c = 0.0;
        for (std::size_t i = 0; i < 40; ++i) c += a[i][4 * l + e] * nd.w_tilde(static_cast<Index>(i));
        acc += c * c;
        inf_corr = std::max(inf_corr, std::abs(c));
      }
      omega = std::max(omega, std::sqrt(acc));
    }
    EXPECT_NEAR(nd.omega, omega, 1e-14);
    EXPECT_NEAR(nd.inf_noise_corr, inf_corr, 1e-14);
    EXPECT_LE(nd.omega_off_support, nd.omega);

    double xb = 1e300, xm = 1e300;
    for (Index q = 0; q < signal.sparsity(); ++q) {
      xb = std::min(xb, nd.x_tilde_nz.segment(4 * q, 4).norm());
      for (Index e = 0; e < 4; ++e) xm = std::min(xm, std::abs(nd.x_tilde_nz(4 * q + e)));
    }
    EXPECT_EQ(nd.x_block_min, xb);
    EXPECT_EQ(nd.x_min, xm);
    EXPECT_TRUE(nd.dense);
  }
}

TEST(DecomposeNoise, SparseBlockIsNotDense) {
  Matrix a = Matrix::Identity(6, 6);
  const BlockDictionary dict(a, 2);
  Vector x = Vector::Zero(6);
  x(0) = 2.0;
  const BlockSparseSignal signal(x, {2, 3}, BlockSupport({0}, 3));
  const NoiseDecomposition nd = decompose_noise(dict, signal, Vector::Zero(6));
  EXPECT_FALSE(nd.dense);
  EXPECT_EQ(nd.x_min, 2.0);
  EXPECT_EQ(nd.x_block_min, 2.0);
}

TEST(ComparisonChain, OrthonormalDenseInstances) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const BlockDictionary dict = tall_dictionary(256, 10, 4, 400 + seed, true);
    const BlockSparseSignal signal = gen_signal(10, 4, 2, 500 + seed);
    const Vector w = gen_noise(256, 0.05, 600 + seed);
    const ComparisonChainReport r = check_comparison_chain(dict, signal, w);
    EXPECT_TRUE(r.dense_blocks);
    EXPECT_TRUE(r.all_hold()) << "seed " << seed;
    for (const InequalityCheck& c : r.checks) {
      if (c.label.starts_with("x_b,min >= sqrt") || c.label.starts_with("omp_ratio")) {
        EXPECT_TRUE(c.asserted);
      }
    }
  }
}

TEST(ComparisonChain, NoiselessAndUnitBlocks) {
  const BlockDictionary dict = tall_dictionary(64, 12, 2, 7, true);
  const BlockSparseSignal signal = gen_signal(12, 2, 2, 8);
  const ComparisonChainReport quiet = check_comparison_chain(dict, signal, Vector::Zero(64));
  EXPECT_EQ(quiet.omega, 0.0);
  EXPECT_TRUE(quiet.all_hold());

  const BlockDictionary unit = tall_dictionary(64, 20, 1, 9, true);
  const BlockSparseSignal s1 = gen_signal(20, 1, 3, 10);
  const ComparisonChainReport r = check_comparison_chain(unit, s1, gen_noise(64, 0.1, 11));
  EXPECT_EQ(r.omega, r.inf_noise_corr);
  EXPECT_EQ(r.x_block_min, r.x_min);
  EXPECT_EQ(r.mu, r.mu_block);
}

TEST(ComparisonChain, SparseBlockOnlyReportsTheRootDLink) {
  const BlockDictionary dict(Matrix::Identity(6, 6), 2);
  Vector x = Vector::Zero(6);
  x(0) = 0.5;
  x(2) = 0.5;
  x(3) = 0.5;
  const BlockSparseSignal signal(x, {2, 3}, BlockSupport({0, 1}, 3));
  const ComparisonChainReport r = check_comparison_chain(dict, signal, Vector::Zero(6));
  EXPECT_FALSE(r.dense_blocks);
  EXPECT_TRUE(r.all_hold());
  for (const InequalityCheck& c : r.checks) {
    if (c.label == "x_b,min >= sqrt(d) * x_min") {
      EXPECT_FALSE(c.asserted);
      EXPECT_FALSE(c.holds);  // 0.5 < sqrt(2) * 0.5
    }
  }
}

TEST(ComparisonChain, RequiresOrthonormalBlocks) {
  const BlockDictionary dict = gen_dictionary(20, 40, 4, 12);
  const BlockSparseSignal signal = gen_signal(10, 4, 1, 13);
  EXPECT_THROW(check_comparison_chain(dict, signal, Vector::Zero(20)), std::invalid_argument);
}

TEST(AppendixBounds, FirstStepHasNoProjection) {
  const BlockDictionary dict = tall_dictionary(128, 8, 2, 20, false);
  const BlockSparseSignal signal = gen_signal(8, 2, 2, 21);
  const AppendixBoundsReport r = check_appendix_bounds(dict, signal, gen_noise(128, 0.1, 22), 0);
  ASSERT_EQ(r.checks.size(), 5u);
  EXPECT_EQ(r.checks[1].label, "b");
  EXPECT_EQ(r.checks[1].lhs, 0.0);
  EXPECT_EQ(r.checks[2].lhs, 0.0);
}

TEST(AppendixBounds, SingleBlockGershgorinFloor) {
  const BlockDictionary dict = tall_dictionary(64, 6, 4, 23, false);
  const BlockSparseSignal signal = gen_signal(6, 4, 1, 24);
  const CoherenceProfile p = coherence_profile(dict);
  const AppendixBoundsReport r =
      check_appendix_bounds(dict, p, signal, Vector::Zero(64), 0, signal.support().indices());
  const Matrix a1 = dict.block(signal.support().indices()[0]);
  const Vector x1 = signal.nonzero_part();
  EXPECT_NEAR(r.checks[0].lhs, (a1.transpose() * a1 * x1).norm(), 1e-12);
  // The generic bound subtracts one d mu_B term; with a single block the
  // Gershgorin floor alone already holds.
  EXPECT_NEAR(r.checks[0].rhs, (p.gershgorin_floor - 4.0 * p.mu_block) * x1.norm(), 1e-12);
  EXPECT_GE(r.checks[0].lhs, p.gershgorin_floor * x1.norm() - 1e-10);
  EXPECT_TRUE(r.checks[0].holds);
}

TEST(AppendixBounds, HoldOnConditionedInstances) {
  int conditioned = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Index d = 1 + static_cast<Index>(seed % 3);
    const Index big_k = 2 + static_cast<Index>(seed % 2);
    const BlockDictionary dict = tall_dictionary(256, 8, d, 1000 + seed, seed % 4 == 0);
    const BlockSparseSignal signal = gen_signal(8, d, big_k, 2000 + seed);
    const Vector w = gen_noise(256, 0.05, 3000 + seed);
    const CoherenceProfile p = coherence_profile(dict);
    for (Index k = 0; k < big_k; ++k) {
      const AppendixBoundsReport r =
          check_appendix_bounds(dict, p, signal, w, k, signal.support().indices());
      if (!r.conditioned) continue;
      ++conditioned;
      const InequalityCheck* bad = r.first_violation();
      EXPECT_EQ(bad, nullptr) << "seed " << seed << " k " << k << " check " << bad->label
                              << ": " << bad->lhs << " vs " << bad->rhs;
      EXPECT_GE(r.operator_norm_upper, r.checks[3].lhs - 1e-12);
    }
  }
  EXPECT_GT(conditioned, 100);
}

TEST(AppendixBounds, ReplaysActualSelectionOrder) {
  const BlockDictionary dict = tall_dictionary(256, 8, 2, 30, false);
  const BlockSparseSignal signal = gen_signal(8, 2, 3, 31);
  const Vector w = gen_noise(256, 0.05, 32);
  const Vector y = dict.matrix() * signal.values() + w;
  const RecoveryTrace t = bomp::bomp(y, dict, StoppingRule::known_k(3));
  std::vector<Index> sorted = t.chosen;
  std::sort(sorted.begin(), sorted.end());
  ASSERT_EQ(sorted, signal.support().indices());
  const CoherenceProfile p = coherence_profile(dict);
  for (Index k = 0; k < 3; ++k) {
    const AppendixBoundsReport r = check_appendix_bounds(dict, p, signal, w, k, t.chosen);
    EXPECT_EQ(r.order, t.chosen);
    if (r.conditioned) EXPECT_TRUE(r.all_hold());
  }
  EXPECT_THROW(check_appendix_bounds(dict, p, signal, w, 0, {0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(check_appendix_bounds(dict, p, signal, w, 3, t.chosen), std::invalid_argument);
}
