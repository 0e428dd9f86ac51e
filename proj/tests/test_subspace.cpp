// Copyright 2026 The dualspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "dualspace/subspace.hpp"
#include "test_util.hpp"

using namespace dualspace;
using dualspace::testing::random_low_rank;
using dualspace::testing::random_uniform;

namespace {

// Normal-equations pseudoinverse for full column rank M. Independent of the
// SVD path.
Eigen::MatrixXd normal_equations_pinv(const Eigen::MatrixXd& m) {
  return (m.transpose() * m).ldlt().solve(m.transpose());
}

Eigen::VectorXd values(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Svd, DiagonalMatrix) {
  Eigen::MatrixXd m(2, 2);
  m << 2, 0, 0, 0;
  const auto r = svd(m);
  EXPECT_DOUBLE_EQ(r.singular_values(0), 2.0);
  EXPECT_DOUBLE_EQ(r.singular_values(1), 0.0);
  EXPECT_NEAR(std::abs(r.left_vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(r.left_vectors(1, 0), 0.0, 1e-15);
}

TEST(Svd, Identity) {
  const auto r = svd(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_TRUE(r.singular_values.isApprox(Eigen::VectorXd::Ones(3)));
}

TEST(Svd, ReconstructsRandomTallMatrix) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd m = random_uniform(rng, 8, 3);
  const auto r = svd(m);
  EXPECT_LE((r.reconstruct() - m).norm(), 1e-6 * std::max(1.0, m.norm()));
  EXPECT_EQ(r.left_vectors.rows(), 8);
  EXPECT_EQ(r.left_vectors.cols(), 3);
  EXPECT_EQ(r.right_vectors.rows(), 3);
  for (Eigen::Index i = 1; i < r.singular_values.size(); ++i) {
    EXPECT_GE(r.singular_values(i - 1), r.singular_values(i));
  }
  EXPECT_LE((r.left_vectors.transpose() * r.left_vectors - Eigen::MatrixXd::Identity(3, 3)).norm(),
            1e-12);
}

TEST(Svd, RejectsNonFinite) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 2);
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(m), InvalidInput);
  m(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(svd(m), InvalidInput);
}

TEST(Svd, RejectsEmpty) {
  EXPECT_THROW(svd(Eigen::MatrixXd(0, 3)), InvalidInput);
}

TEST(NumericalRank, Examples) {
  EXPECT_EQ(numerical_rank(values({3.0, 2.0, 0.0}), 1e-6), 2);
  EXPECT_EQ(numerical_rank(values({0.0}), 1e-6), 0);
  EXPECT_EQ(numerical_rank(values({1.0, 1e-12}), 1e-6), 1);
}

TEST(NumericalRank, ThresholdIsStrict) {
  EXPECT_EQ(numerical_rank(values({1.0, 1e-6}), 1e-6), 1);
  EXPECT_EQ(numerical_rank(values({1.0, 2e-6}), 1e-6), 2);
}

TEST(NumericalRank, RejectsBadInput) {
  EXPECT_THROW(numerical_rank(values({1.0, 2.0}), 1e-6), InvalidInput);
  EXPECT_THROW(numerical_rank(values({1.0, -0.5}), 1e-6), InvalidInput);
  EXPECT_THROW(numerical_rank(values({1.0}), 0.0), InvalidInput);
  EXPECT_THROW(numerical_rank(values({1.0}), -1.0), InvalidInput);
}

TEST(RangeProjector, SingleBasisVector) {
  Eigen::MatrixXd m(2, 1);
  m << 1, 0;
  const auto p = range_projector(m, 1e-6);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_LE((p.matrix() - expected).norm(), 1e-15);
  EXPECT_EQ(p.rank(), 1);
}

TEST(RangeProjector, FullRankIsIdentity) {
  const auto p = range_projector(Eigen::MatrixXd::Identity(3, 3), 1e-6);
  EXPECT_LE((p.matrix() - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-14);
  EXPECT_EQ(p.rank(), 3);
}

TEST(RangeProjector, MatchesGramSchmidtOracle) {
  std::mt19937_64 rng(16);
  const Eigen::MatrixXd m = random_uniform(rng, 16, 4);
  const auto p = range_projector(m, 1e-6);
  const auto q = oracle_projector(m);
  EXPECT_LE((p.matrix() - q.matrix()).norm(), 1e-6);
  EXPECT_EQ(p.rank(), q.rank());
}

TEST(RangeProjector, FixesEveryColumn) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd m = random_uniform(rng, 12, 5);
  const auto p = range_projector(m, 1e-6);
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const Eigen::VectorXd c = m.col(k);
    EXPECT_LE((p * c - c).norm(), 1e-5 * std::max(1.0, c.norm()));
  }
  EXPECT_NO_THROW(p.validate());
}

TEST(RangeProjector, ZeroMatrixGivesZeroProjector) {
  const auto p = range_projector(Eigen::MatrixXd::Zero(4, 2), 1e-6);
  EXPECT_EQ(p.rank(), 0);
  EXPECT_EQ(p.matrix().norm(), 0.0);
  const auto c = complement_projector(p);
  EXPECT_EQ(c.rank(), 4);
  EXPECT_EQ(c.matrix(), Eigen::MatrixXd::Identity(4, 4));
}

TEST(RangeProjector, RankDeficientInput) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd m = random_low_rank(rng, 10, 6, 3);
  const auto p = range_projector(m, 1e-6);
  EXPECT_EQ(p.rank(), 3);
  EXPECT_NEAR(p.matrix().trace(), 3.0, 1e-10);
}

TEST(RangeProjector, ExactlySymmetric) {
  std::mt19937_64 rng(9);
  const auto p = range_projector(random_uniform(rng, 20, 7), 1e-6);
  EXPECT_EQ(p.matrix(), p.matrix().transpose());
}

TEST(ComplementProjector, Examples) {
  Eigen::MatrixXd m(2, 1);
  m << 1, 0;
  const auto c = complement_projector(range_projector(m, 1e-6));
  Eigen::MatrixXd expected(2, 2);
  expected << 0, 0, 0, 1;
  EXPECT_LE((c.matrix() - expected).norm(), 1e-15);
  EXPECT_EQ(c.rank(), 1);

  const auto full = complement_projector(Projector<double>::identity(5, 1e-6));
  EXPECT_EQ(full.rank(), 0);
  EXPECT_EQ(full.matrix().norm(), 0.0);

  const auto none = complement_projector(Projector<double>::zero(5, 1e-6));
  EXPECT_EQ(none.rank(), 5);
  EXPECT_EQ(none.matrix(), Eigen::MatrixXd::Identity(5, 5));
}

TEST(Pseudoinverse, Scalar) {
  Eigen::MatrixXd m(1, 1);
  m << 2;
  EXPECT_NEAR(pseudoinverse(m, 1e-6)(0, 0), 0.5, 1e-15);
}

TEST(Pseudoinverse, IdempotentDiagonal) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 0;
  EXPECT_LE((pseudoinverse(m, 1e-6) - m).norm(), 1e-15);
}

TEST(Pseudoinverse, MatchesNormalEquationsOracle) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd m = random_uniform(rng, 6, 3);
  EXPECT_LE((pseudoinverse(m, 1e-6) - normal_equations_pinv(m)).norm(), 1e-5);
}

TEST(Pseudoinverse, GoldenRankDeficient) {
  // Rows repeat, so A has rank 2. Closed-form pseudoinverse.
  Eigen::MatrixXd a(4, 3);
  a << 2, -4, 5, 6, 0, 3, 2, -4, 5, 6, 0, 3;
  Eigen::MatrixXd expected(3, 4);
  expected << -2, 6, -2, 6, -5, 3, -5, 3, 4, 0, 4, 0;
  expected /= 72.0;
  EXPECT_LE((pseudoinverse(a, 1e-6) - expected).norm(), 1e-12);
}

TEST(Pseudoinverse, ZeroMatrix) {
  EXPECT_EQ(pseudoinverse(Eigen::MatrixXd::Zero(3, 2), 1e-6), Eigen::MatrixXd::Zero(2, 3));
}

TEST(OracleProjector, Examples) {
  Eigen::MatrixXd m(2, 1);
  m << 1, 0;
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_LE((oracle_projector(m).matrix() - expected).norm(), 1e-15);

  std::mt19937_64 rng(1);
  const Eigen::VectorXd c = random_uniform(rng, 6, 1);
  Eigen::MatrixXd dup(6, 2);
  dup << c, c;
  const auto a = oracle_projector(dup);
  const auto b = oracle_projector(Eigen::MatrixXd(c));
  EXPECT_EQ(a.rank(), 1);
  EXPECT_LE((a.matrix() - b.matrix()).norm(), 1e-12);
}

TEST(OracleProjector, CrossValidatesRangeProjector) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd m = random_uniform(rng, 8, 3);
  EXPECT_LE((oracle_projector(m).matrix() - range_projector(m, 1e-6).matrix()).norm(), 1e-6);
}

TEST(Projector, FromMatrixValidates) {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0.5, 0, 1;
  EXPECT_THROW(Projector<double>::from_matrix(bad, 2, 1e-6), InvalidData);
  Eigen::MatrixXd not_idempotent = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(Projector<double>::from_matrix(not_idempotent, 2, 1e-6), InvalidData);
  EXPECT_THROW(Projector<double>::from_matrix(Eigen::MatrixXd::Identity(3, 3), 2, 1e-6),
               InvalidData);
  EXPECT_NO_THROW(Projector<double>::from_matrix(Eigen::MatrixXd::Identity(3, 3), 3, 1e-6));
}

TEST(Projector, WorksInSinglePrecision) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXf m = random_uniform(rng, 10, 3).cast<float>();
  const auto p = range_projector(m, 1e-5f);
  EXPECT_EQ(p.rank(), 3);
  EXPECT_LE((p.matrix() * p.matrix() - p.matrix()).norm(), 1e-5f);
}

// Property sweeps over random shapes.

class SubspaceProperties : public ::testing::TestWithParam<int> {};

TEST_P(SubspaceProperties, ProjectorInvariants) {
  std::mt19937_64 rng(1000 + GetParam());
  std::uniform_int_distribution<int> dim_dist(4, 32);
  std::uniform_int_distribution<int> k_dist(1, 8);
  const int d = dim_dist(rng);
  const int k = k_dist(rng);
  // every third case is rank deficient
  const Eigen::MatrixXd m = GetParam() % 3 == 0 && k > 1
                                ? random_low_rank(rng, d, k, std::max(1, k / 2))
                                : random_uniform(rng, d, k);
  const auto p = range_projector(m, 1e-6);
  const auto c = complement_projector(p);
  const double scale = std::max(1.0, p.matrix().norm());

  EXPECT_LE((p.matrix() * p.matrix() - p.matrix()).norm(), 1e-6 * scale);
  EXPECT_LE((p.matrix() - p.matrix().transpose()).norm(), 1e-8 * scale);
  EXPECT_NEAR(p.matrix().trace(), static_cast<double>(p.rank()), 1e-5);
  EXPECT_EQ(p.rank() + c.rank(), d);
  EXPECT_LE((p.matrix() * c.matrix()).norm(), 1e-6);
  EXPECT_LE((p.matrix() - oracle_projector(m).matrix()).norm(), 1e-6);

  // span is unchanged by column scaling
  Eigen::MatrixXd scaled = m;
  scaled.col(0) *= -3.7;
  EXPECT_LE((range_projector(scaled, 1e-6).matrix() - p.matrix()).norm(), 1e-6);

  // R R^+ is the same projector
  EXPECT_LE((m * pseudoinverse(m, 1e-6) - p.matrix()).norm(), 1e-5);
  EXPECT_LE((alignment_projector(m, 1e-6).matrix() - p.matrix()).norm(), 1e-5);
}

TEST_P(SubspaceProperties, PenroseConditions) {
  std::mt19937_64 rng(2000 + GetParam());
  std::uniform_int_distribution<int> size_dist(1, 12);
  const int rows = size_dist(rng);
  const int cols = size_dist(rng);
  const int rank = std::uniform_int_distribution<int>(1, std::min(rows, cols))(rng);
  const Eigen::MatrixXd m = random_low_rank(rng, rows, cols, rank);
  const Eigen::MatrixXd x = pseudoinverse(m, 1e-6);
  EXPECT_LE((m * x * m - m).norm(), 1e-5);
  EXPECT_LE((x * m * x - x).norm(), 1e-5);
  EXPECT_LE(((m * x).transpose() - m * x).norm(), 1e-5);
  EXPECT_LE(((x * m).transpose() - x * m).norm(), 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Random, SubspaceProperties, ::testing::Range(0, 40));
