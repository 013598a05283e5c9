#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "dynkin/field.hpp"
#include "support.hpp"

using namespace dynkin;
using testing::generator;
using testing::mat;
using testing::path_chain;
using testing::random_sign_matrix;
using testing::random_valid_generator;

namespace {

const GeneratorMatrix kTwoState = generator({{-2, 1}, {1, -2}});
const GeneratorMatrix kPath3 = generator({{-2, 1, 0}, {1, -3, 1}, {0, 1, -2}});

SignMatrix off_diag_negative(Index n) {
  SignMatrix s = SignMatrix::all_positive(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) s.s(i, j) = -1.0;
    }
  }
  return s;
}

/// Textbook covariance-domain prediction, deliberately through Eigen's own
/// factorization so the two routes share no code.
Vector covariance_route(const GeneratorMatrix& q, const SignMatrix& s, const IndexSet& a_set, Index b) {
  const Matrix sigma = covariance_direct(q, s).sigma;
  const Matrix sigma_aa = submatrix(sigma, a_set, a_set);
  Vector sigma_ba(static_cast<Index>(a_set.size()));
  for (std::size_t j = 0; j < a_set.size(); ++j) sigma_ba(static_cast<Index>(j)) = sigma(b, a_set[j]);
  return sigma_aa.ldlt().solve(sigma_ba);
}

}  // namespace

TEST_CASE("factor") {
  SUBCASE("identity factors to itself") {
    const FieldFactor f = factor(CovarianceMatrix{Matrix::Identity(3, 3)});
    CHECK((f.lower.array() == Matrix::Identity(3, 3).array()).all());
  }

  SUBCASE("reconstruction") {
    const CovarianceMatrix sigma = covariance_direct(kTwoState, SignMatrix::all_positive(2));
    const FieldFactor f = factor(sigma);
    CHECK(max_abs_diff(f.lower * f.lower.transpose(), sigma.sigma) <= 1e-12);
  }

  SUBCASE("an indefinite matrix reports the failing pivot") {
    try {
      factor(CovarianceMatrix{mat({{1, 2}, {2, 1}})});
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(e.pivot() == 1);
    }
  }

  SUBCASE("asymmetric input is rejected before factorization") {
    CHECK_THROWS_AS(factor(CovarianceMatrix{mat({{1, 0.5}, {0, 1}})}), StructuralError);
  }
}

TEST_CASE("sample_field moments and determinism") {
  const std::size_t n_samples = 100000;

  SUBCASE("single state variance") {
    const FieldFactor f = factor(CovarianceMatrix{Matrix::Identity(1, 1)});
    const Matrix draws = sample_field(f, 2024, n_samples);
    const double var = draws.col(0).squaredNorm() / static_cast<double>(n_samples);
    CHECK(std::abs(var - 1.0) <= 0.01);
  }

  SUBCASE("fixed seed reproduces the draws; the index is the stream") {
    const FieldFactor f = factor(covariance_direct(kTwoState, SignMatrix::all_positive(2)));
    const Matrix a = sample_field(f, 9, 64);
    const Matrix b = sample_field(f, 9, 64);
    CHECK((a.array() == b.array()).all());
    const Matrix c = sample_field(f, 9, 32);
    CHECK((a.topRows(32).array() == c.array()).all());
  }

  SUBCASE("signed two-state chain: negative correlation about -1/2") {
    const CovarianceMatrix sigma = covariance_direct(kTwoState, off_diag_negative(2));
    const Matrix draws = sample_field(factor(sigma), 31415, n_samples);
    const double n = static_cast<double>(n_samples);
    const double cov01 = draws.col(0).dot(draws.col(1)) / n;
    const double v0 = draws.col(0).squaredNorm() / n;
    const double v1 = draws.col(1).squaredNorm() / n;
    CHECK(std::abs(cov01 / std::sqrt(v0 * v1) + 0.5) <= 3.0 * (1.0 - 0.25) / std::sqrt(n));

    // Entrywise empirical covariance within three standard errors.
    for (Index i = 0; i < 2; ++i) {
      for (Index j = 0; j < 2; ++j) {
        const double emp = draws.col(i).dot(draws.col(j)) / n;
        const double se =
            std::sqrt((sigma.sigma(i, i) * sigma.sigma(j, j) + sigma.sigma(i, j) * sigma.sigma(i, j)) / n);
        CHECK(std::abs(emp - sigma.sigma(i, j)) <= 3.0 * se);
      }
    }
  }
}

TEST_CASE("predict_direct on the 3-state path") {
  SUBCASE("all-positive signs") {
    const PredictionResult pred = predict_direct(kPath3, SignMatrix::all_positive(3), {0, 2}, 1);
    CHECK(pred.coefficients(0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(pred.coefficients(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    REQUIRE(pred.others == IndexSet{1});
    CHECK(pred.cond_cov(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }

  SUBCASE("one negative sign flips one coefficient") {
    SignMatrix s = SignMatrix::all_positive(3);
    s.s(0, 1) = s.s(1, 0) = -1.0;
    const PredictionResult pred = predict_direct(kPath3, s, {0, 2}, 1);
    CHECK(pred.coefficients(0) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
    CHECK(pred.coefficients(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }

  SUBCASE("two states, observe one") {
    const PredictionResult pred = predict_direct(kTwoState, SignMatrix::all_positive(2), {1}, 0);
    CHECK(pred.coefficients(0) == doctest::Approx(0.5).epsilon(1e-14));
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(predict_direct(kPath3, SignMatrix::all_positive(3), {0, 1}, 1), StructuralError);
    CHECK_THROWS_AS(predict_direct(kPath3, SignMatrix::all_positive(3), {}, 1), StructuralError);
  }
}

TEST_CASE("precision route equals the covariance route on random chains") {
  RngStream rng = RngStream::make(77, 0, 0);
  for (int rep = 0; rep < 15; ++rep) {
    const Index n = 3 + static_cast<Index>(rng.next_u64() % 10);
    const GeneratorMatrix gen = random_valid_generator(rng, n);
    const SignMatrix s = random_sign_matrix(rng, n);

    const Index b = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
    IndexSet a_set;
    for (Index i = 0; i < n; ++i) {
      if (i != b && rng.uniform01() < 0.5) a_set.push_back(i);
    }
    if (a_set.empty()) a_set.push_back(b == 0 ? 1 : 0);

    const PredictionResult pred = predict_direct(gen, s, a_set, b);
    const Vector textbook = covariance_route(gen, s, a_set, b);
    CHECK((pred.coefficients - textbook).cwiseAbs().maxCoeff() <= 1e-10);

    // Conditional covariance agrees with the covariance-domain Schur form.
    const Matrix sigma = covariance_direct(gen, s).sigma;
    const Matrix sigma_bb = submatrix(sigma, pred.others, pred.others);
    const Matrix sigma_ba = submatrix(sigma, pred.others, a_set);
    const Matrix sigma_aa = submatrix(sigma, a_set, a_set);
    const Matrix cond = sigma_bb - sigma_ba * sigma_aa.ldlt().solve(sigma_ba.transpose());
    CHECK(max_abs_diff(pred.cond_cov, cond) <= 1e-10);
  }
}

TEST_CASE("full-conditional weights come from the precision matrix row") {
  // With everything except b observed, the weights are -M(b,a)/M(b,b).
  RngStream rng = RngStream::make(78, 0, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 3 + static_cast<Index>(rng.next_u64() % 8);
    const GeneratorMatrix gen = random_valid_generator(rng, n);
    const SignMatrix s = random_sign_matrix(rng, n);
    const Index b = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
    IndexSet a_set;
    for (Index i = 0; i < n; ++i) {
      if (i != b) a_set.push_back(i);
    }
    const PredictionResult pred = predict_direct(gen, s, a_set, b);
    const Matrix m = signed_precision(gen, s);
    for (std::size_t j = 0; j < a_set.size(); ++j) {
      CHECK(pred.coefficients(static_cast<Index>(j)) ==
            doctest::Approx(-m(b, a_set[j]) / m(b, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("coefficients agree with the inverse of the kept covariance block") {
  // Marginalize everything outside A and b: the weights must be readable off
  // the inverse of that covariance block.
  RngStream rng = RngStream::make(79, 0, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = 4 + static_cast<Index>(rng.next_u64() % 8);
    const GeneratorMatrix gen = random_valid_generator(rng, n);
    const SignMatrix s = random_sign_matrix(rng, n);
    const Index b = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
    IndexSet a_set;
    for (Index i = 0; i < n; ++i) {
      if (i != b && rng.uniform01() < 0.5) a_set.push_back(i);
    }
    if (a_set.empty()) a_set.push_back(b == 0 ? 1 : 0);

    IndexSet kept = a_set;
    kept.push_back(b);
    std::sort(kept.begin(), kept.end());
    const Matrix sigma = covariance_direct(gen, s).sigma;
    const Matrix block_precision = submatrix(sigma, kept, kept).inverse();
    const auto pos = [&](Index v) {
      return static_cast<Index>(std::distance(kept.begin(), std::find(kept.begin(), kept.end(), v)));
    };

    const PredictionResult pred = predict_direct(gen, s, a_set, b);
    for (std::size_t j = 0; j < a_set.size(); ++j) {
      const double expected = -block_precision(pos(a_set[j]), pos(b)) / block_precision(pos(b), pos(b));
      CHECK(pred.coefficients(static_cast<Index>(j)) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("gaussian_lhs_analytic") {
  SUBCASE("single state, unit weight: 2^{-3/2}") {
    const GeneratorMatrix single = generator({{-1}});
    const double v = gaussian_lhs_analytic(single, SignMatrix::all_positive(1), Vector::Ones(1), 0, 0);
    CHECK(std::abs(v - std::pow(2.0, -1.5)) <= 1e-15);
  }

  SUBCASE("zero weights return the covariance bit for bit") {
    const SignMatrix s = off_diag_negative(2);
    const double v = gaussian_lhs_analytic(kTwoState, s, Vector::Zero(2), 0, 1);
    CHECK(v == covariance_direct(kTwoState, s).sigma(0, 1));
  }

  SUBCASE("field-sampling cross-check") {
    const SignMatrix s = off_diag_negative(2);
    Vector d(2);
    d << 1.0, 0.5;
    const double analytic = gaussian_lhs_analytic(kTwoState, s, d, 0, 1);

    const Matrix draws = sample_field(factor(covariance_direct(kTwoState, s)), 555, 200000);
    double sum = 0.0, sum_sq = 0.0;
    for (Index i = 0; i < draws.rows(); ++i) {
      const double v = draws(i, 0) * draws(i, 1) *
                       std::exp(-0.5 * (d(0) * draws(i, 0) * draws(i, 0) + d(1) * draws(i, 1) * draws(i, 1)));
      sum += v;
      sum_sq += v * v;
    }
    const double n = static_cast<double>(draws.rows());
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) / n);
    CHECK(std::abs(mean - analytic) <= 3.0 * se);
  }

  SUBCASE("negative weights are rejected") {
    Vector d(2);
    d << 0.0, -0.1;
    CHECK_THROWS_AS(gaussian_lhs_analytic(kTwoState, SignMatrix::all_positive(2), d, 0, 0),
                    StructuralError);
  }
}

TEST_CASE("conditional independence across a separator") {
  SUBCASE("middle of the path separates the ends") {
    const SeparationReport report =
        cond_independence_check(kPath3, SignMatrix::all_positive(3), {0}, {1}, {2});
    CHECK(report.separated);
    CHECK(report.zero_block_ok);
    CHECK(report.max_cross_abs <= 1e-12);
  }

  SUBCASE("one vertex does not separate a cycle") {
    const GeneratorMatrix cycle = testing::cycle_chain(5);
    const SeparationReport report =
        cond_independence_check(cycle, SignMatrix::all_positive(5), {1}, {0}, {3});
    CHECK_FALSE(report.separated);  // the long way around avoids B
  }

  SUBCASE("separation is a graph property: any sign matrix gives the zero block") {
    const GeneratorMatrix path = path_chain(5);
    RngStream rng = RngStream::make(91, 0, 0);
    for (int rep = 0; rep < 10; ++rep) {
      const SignMatrix s = random_sign_matrix(rng, 5);
      const SeparationReport report = cond_independence_check(path, s, {0, 1}, {2}, {3, 4});
      CHECK(report.separated);
      CHECK(report.zero_block_ok);
    }
  }

  SUBCASE("overlapping sets are rejected") {
    CHECK_THROWS_AS(cond_independence_check(kPath3, SignMatrix::all_positive(3), {0}, {0}, {2}),
                    StructuralError);
  }
}
