#include "doctest.h"

#include <cmath>

#include "missingmass/enumeration.hpp"
#include "missingmass/estimators.hpp"
#include "missingmass/evaluation.hpp"
#include "oracle.hpp"

using namespace missingmass;

namespace {

SampleSet fixture_sample() {
  return SampleSet(8, {0, 0, 2, 2, 2, 4, 4, 5, 7, 7});
}

}  // namespace

TEST_CASE("spec strings parse and print") {
  for (const char* text : {"cml", "good-turing", "add-constant:c=1",
                           "fisher:init=add-constant:c=1,K=5,psi=1/N,mc=2000"}) {
    const EstimatorSpec spec = parse_estimator_spec(text);
    CHECK(parse_estimator_spec(spec.name()).name() == spec.name());
  }
  CHECK(parse_estimator_spec("good-turing:nprime=12").gt_normalizer == 12.0);
  CHECK(parse_estimator_spec("good-turing:numerator=unseen").gt_unseen_numerator);
  CHECK(parse_estimator_spec("fisher:init=good-turing,K=2,psi=0.5,mc=100").step == 0.5);
  CHECK_THROWS_AS(parse_estimator_spec("katz"), std::invalid_argument);
  CHECK_THROWS_AS(parse_estimator_spec("add-constant:c=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_estimator_spec("fisher:K=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_estimator_spec("fisher:init=fisher:init=cml,K=1,K=1"),
                  std::invalid_argument);
}

TEST_CASE("empirical-frequency estimator") {
  const SampleSet s = fixture_sample();
  const EstimateResult r = estimate_cml(s);
  CHECK(r.theta_hat == std::vector<double>{0.2, 0.0, 0.3, 0.0, 0.2, 0.1, 0.0, 0.2});
  CHECK(r.unseen_total == 0.0);

  SUBCASE("single repeated symbol gives an indicator") {
    const SampleSet one(3, {1, 1, 1, 1});
    CHECK(estimate_cml(one).theta_hat == std::vector<double>{0.0, 1.0, 0.0});
  }
  SUBCASE("always sums to one") {
    rng r2(3);
    for (int rep = 0; rep < 25; ++rep) {
      const Pmf p = oracle::random_pmf(5, r2);
      rng stream = r2.derive(rep);
      const SampleSet draw = draw_samples(p, 12, stream);
      double total = 0.0;
      for (double t : estimate_cml(draw).theta_hat) total += t;
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("smoothed Good-Turing estimator") {
  const SampleSet s = fixture_sample();
  const EstimatorSpec gt = parse_estimator_spec("good-turing");
  const EstimateResult r = estimate_good_turing(s, gt);
  // one singleton -> total 1/10 shared by three unseen symbols
  CHECK(r.unseen_total == doctest::Approx(0.1).epsilon(1e-15));
  for (double v : r.unseen_values) CHECK(v == doctest::Approx(1.0 / 30.0).epsilon(1e-15));

  SUBCASE("singleton-free samples hit the floor phi(0)=1") {
    const SampleSet no_singletons(3, {0, 0, 1, 1});
    const EstimateResult q = estimate_good_turing(no_singletons, gt);
    CHECK(q.unseen_total == doctest::Approx(1.0 / 4.0).epsilon(1e-15));
  }
  SUBCASE("literal unseen-count numerator is available behind the flag") {
    const EstimatorSpec literal = parse_estimator_spec("good-turing:numerator=unseen");
    const EstimateResult q = estimate_good_turing(s, literal);
    CHECK(q.unseen_total == doctest::Approx(0.3).epsilon(1e-15));
  }
  SUBCASE("no unseen symbols: estimate reduces to empirical frequencies") {
    const SampleSet full(3, {0, 1, 2, 2});
    const EstimateResult q = estimate_good_turing(full, gt);
    CHECK(q.unseen_values.empty());
    CHECK(q.unseen_total == 0.0);
    CHECK(q.theta_hat == estimate_cml(full).theta_hat);
  }
  SUBCASE("equal share across the unseen set, vector sums to one") {
    rng r2(17);
    for (int rep = 0; rep < 25; ++rep) {
      const Pmf p = oracle::random_pmf(6, r2);
      rng stream = r2.derive(rep);
      const SampleSet draw = draw_samples(p, 8, stream);
      const EstimateResult q = estimate_good_turing(draw, gt);
      for (std::size_t i = 1; i < q.unseen_values.size(); ++i)
        CHECK(q.unseen_values[i] == q.unseen_values[0]);
      double total = 0.0;
      for (double t : q.theta_hat) {
        CHECK(t >= 0.0);
        total += t;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("add-constant estimator") {
  const SampleSet s = fixture_sample();
  const EstimateResult r = estimate_add_constant(s, 1.0);
  CHECK(r.unseen_total == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  for (double v : r.unseen_values) CHECK(v == doctest::Approx(1.0 / 48.0).epsilon(1e-15));

  SUBCASE("total missing-mass estimate vanishes as c goes to zero") {
    double prev = 1.0;
    for (double c : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double total = estimate_add_constant(s, c).unseen_total;
      CHECK(total < prev);
      prev = total;
    }
    CHECK(prev <= 1e-8);
  }
  SUBCASE("total is strictly monotone in the unseen-set size") {
    // the denominator N + c(M - |G0| + 1) strictly shrinks with |G0|, so the
    // total missing-mass estimate strictly grows with it
    const double n = 10, m = 8, c = 1.0;
    for (int g0 = 1; g0 <= 8; ++g0) {
      const double total = c / (n + c * (m - g0 + 1.0));
      const double prev = c / (n + c * (m - (g0 - 1) + 1.0));
      CHECK(total > prev);
    }
  }
  SUBCASE("nonnegative entries summing to one") {
    rng r2(29);
    for (int rep = 0; rep < 25; ++rep) {
      const Pmf p = oracle::random_pmf(5, r2);
      rng stream = r2.derive(rep);
      const SampleSet draw = draw_samples(p, 6, stream);
      const EstimateResult q = estimate_add_constant(draw, 0.7);
      double total = 0.0;
      for (double t : q.theta_hat) {
        CHECK(t >= 0.0);
        total += t;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("histogram core agrees with the packaged estimators") {
  rng r(31);
  const EstimatorSpec specs[] = {parse_estimator_spec("cml"),
                                 parse_estimator_spec("good-turing"),
                                 parse_estimator_spec("add-constant:c=0.5")};
  for (int rep = 0; rep < 20; ++rep) {
    const Pmf p = oracle::random_pmf(6, r);
    rng stream = r.derive(rep);
    const SampleSet draw = draw_samples(p, 9, stream);
    for (const EstimatorSpec& spec : specs) {
      std::vector<double> direct;
      estimate_theta_on_counts(spec, draw.counts(), 9, direct);
      CHECK(estimate_closed_form(spec, draw).theta_hat == direct);
    }
  }
}

TEST_CASE("empirical frequencies are mean-unbiased") {
  SUBCASE("exactly, by enumeration") {
    for (const Pmf& p : {uniform_pmf(3), zipf_pmf(3, 1.0)}) {
      for (int n : {2, 3, 4}) {
        for (std::size_t m = 0; m < 3; ++m) {
          const double mean = exact_expectation(p, n, [&](const std::vector<int>& counts) {
            return static_cast<double>(counts[m]) / static_cast<double>(n);
          });
          CHECK(std::abs(mean - p[m]) <= 1e-12);
        }
      }
    }
  }
  SUBCASE("within Monte Carlo noise at larger sizes") {
    const Pmf p = zipf_pmf(5, 1.0);
    const int n = 10;
    const std::size_t trials = 20000;
    std::vector<double> mean(5, 0.0);
    rng base(99);
    std::vector<int> counts;
    alias_table table(p.values());
    for (std::size_t t = 0; t < trials; ++t) {
      rng stream = base.derive(t);
      draw_counts(table, n, stream, counts);
      for (std::size_t m = 0; m < 5; ++m)
        mean[m] += static_cast<double>(counts[m]) / static_cast<double>(n);
    }
    for (std::size_t m = 0; m < 5; ++m) {
      mean[m] /= static_cast<double>(trials);
      const double se = std::sqrt(p[m] * (1 - p[m]) / static_cast<double>(n * trials));
      CHECK(std::abs(mean[m] - p[m]) <= 3.0 * se);
    }
  }
}
