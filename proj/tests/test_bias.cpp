#include "doctest.h"

#include <cmath>
#include <sstream>

#include "missingmass/bias.hpp"
#include "missingmass/information.hpp"
#include "oracle.hpp"

using namespace missingmass;

TEST_CASE("closed-form bias of the empirical-frequency estimator") {
  SUBCASE("uniform M=3, N=2 gives -4/27 on every symbol") {
    const BiasProfile p = bias_cml(uniform_pmf(3), 2);
    for (double b : p.b) CHECK(b == doctest::Approx(-4.0 / 27.0).epsilon(1e-14));
    CHECK(max_abs(p.S) == 0.0);
  }
  SUBCASE("vanishes as the sample grows") {
    const BiasProfile p = bias_cml(zipf_pmf(4, 1.0), 400);
    for (double b : p.b) CHECK(std::abs(b) <= 1e-9);
  }
  SUBCASE("enumeration reproduces the closed form") {
    const Pmf pmf = zipf_pmf(3, 1.0);
    const BiasProfile closed = bias_cml(pmf, 3);
    const BiasProfile enumd = bias_enumerate(parse_estimator_spec("cml"), pmf, 3);
    for (std::size_t m = 0; m < 3; ++m)
      CHECK(std::abs(closed.b[m] - enumd.b[m]) <= 1e-12);
    CHECK(max_abs(enumd.S) <= 1e-12);
  }
}

TEST_CASE("enumerated profiles") {
  SUBCASE("symmetry under the uniform pmf") {
    const BiasProfile p =
        bias_enumerate(parse_estimator_spec("add-constant:c=1"), uniform_pmf(3), 2);
    CHECK(p.b[0] == doctest::Approx(p.b[1]).epsilon(1e-14));
    CHECK(p.b[1] == doctest::Approx(p.b[2]).epsilon(1e-14));
  }
  SUBCASE("bit-stable across repeated runs") {
    const Pmf pmf = zipf_pmf(3, 0.7);
    const EstimatorSpec spec = parse_estimator_spec("good-turing");
    const BiasProfile a = bias_enumerate(spec, pmf, 4);
    const BiasProfile b = bias_enumerate(spec, pmf, 4);
    CHECK(a.b == b.b);
    CHECK(a.S.a == b.S.a);
  }
  SUBCASE("state cap advises Monte Carlo mode") {
    CHECK_THROWS_WITH_AS(bias_enumerate(parse_estimator_spec("cml"), zipf_pmf(12, 1.0), 30),
                         doctest::Contains("Monte Carlo"), std::invalid_argument);
  }
}

TEST_CASE("auxiliary matrix equals the centred score cross-moment") {
  // For each estimator, enumerate E[Gamma Delta^T] from raw sequences with
  // Gamma the diagonal of centred errors on the conditioning event, and
  // compare with the profile's tractable-form S.
  const Pmf pmf = zipf_pmf(3, 1.0);
  for (const char* est_text : {"add-constant:c=1", "cml", "good-turing"}) {
    const EstimatorSpec est = parse_estimator_spec(est_text);
    for (int n = 1; n <= 3; ++n) {
      std::vector<double> cond_mean(3, 0.0);
      std::vector<double> th;
      oracle::all_sequences(3, n, [&](const std::vector<int>& seq) {
        const SampleSet s(3, seq);
        const double w = oracle::sequence_probability(pmf.values(), seq);
        estimate_theta_on_counts(est, s.counts(), n, th);
        for (std::size_t m = 0; m < 3; ++m)
          if (s.is_unseen(m)) cond_mean[m] += w * th[m];
      });
      for (std::size_t m = 0; m < 3; ++m)
        cond_mean[m] /= pr_unobserved(pmf, static_cast<std::size_t>(n), m);
      mat gd(3, 3);
      oracle::all_sequences(3, n, [&](const std::vector<int>& seq) {
        const SampleSet s(3, seq);
        const double w = oracle::sequence_probability(pmf.values(), seq);
        estimate_theta_on_counts(est, s.counts(), n, th);
        const mat delta = score_matrix(pmf, s);
        for (std::size_t m = 0; m < 3; ++m) {
          if (!s.is_unseen(m)) continue;
          const double eps = th[m] - cond_mean[m];
          for (std::size_t j = 0; j < 3; ++j) gd(m, j) += w * eps * delta(j, m);
        }
      });
      const BiasProfile prof = bias_enumerate(est, pmf, n);
      CHECK(max_abs(gd - prof.S) <= 1e-10);
    }
  }
}

TEST_CASE("Monte Carlo profiles converge to enumeration") {
  const Pmf pmf = zipf_pmf(3, 1.0);
  const int n = 3;
  for (const char* est_text : {"add-constant:c=1", "good-turing"}) {
    const EstimatorSpec est = parse_estimator_spec(est_text);
    const BiasProfile exact = bias_enumerate(est, pmf, n);
    const BiasProfile mc = bias_monte_carlo(est, pmf, n, 40000, rng(2025));
    for (std::size_t m = 0; m < 3; ++m) {
      const double allowance = 3.0 * mc.b_stderr[m] + 1e-12;
      CHECK(std::abs(mc.b[m] - exact.b[m]) <= allowance);
      for (std::size_t j = 0; j < 3; ++j) {
        if (j == m) continue;
        CHECK(std::abs(mc.S(m, j) - exact.S(m, j)) <= 3.0 * mc.S_stderr(m, j) + 1e-12);
      }
    }
  }
}

TEST_CASE("distance from the constant-bias set") {
  const mat u = nullspace_basis(4);
  SUBCASE("zero bias is unbiased") {
    CHECK(unbiasedness_defect(vec(4, 0.0), u).defect == 0.0);
  }
  SUBCASE("constant bias is unbiased with beta recovered") {
    const UnbiasednessDefect d = unbiasedness_defect(vec(4, 5.0), u);
    CHECK(d.defect <= 1e-12);
    CHECK(d.beta == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("a single-coordinate bias projects to sqrt(1 - 1/M)") {
    vec b(4, 0.0);
    b[0] = 1.0;
    CHECK(unbiasedness_defect(b, u).defect ==
          doctest::Approx(std::sqrt(1.0 - 0.25)).epsilon(1e-13));
  }
  SUBCASE("empirical frequencies: defect zero under uniform, positive otherwise") {
    const mat u3 = nullspace_basis(3);
    CHECK(unbiasedness_defect(bias_cml(uniform_pmf(3), 4).b, u3).defect <= 1e-12);
    CHECK(unbiasedness_defect(bias_cml(zipf_pmf(3, 1.0), 4).b, u3).defect > 1e-4);
  }
}

TEST_CASE("profile CSV export carries provenance") {
  const Pmf pmf = zipf_pmf(3, 1.0);
  const BiasProfile mc =
      bias_monte_carlo(parse_estimator_spec("add-constant:c=1"), pmf, 3, 500, rng(12));
  std::ostringstream out;
  write_profile_csv(out, mc);
  const std::string csv = out.str();
  CHECK(csv.find("quantity,row,col,value,stderr,provenance,samples,seed") == 0);
  CHECK(csv.find("monte_carlo,500") != std::string::npos);
  const BiasProfile closed = bias_cml(pmf, 3);
  std::ostringstream out2;
  write_profile_csv(out2, closed);
  CHECK(out2.str().find("closed_form") != std::string::npos);
}
