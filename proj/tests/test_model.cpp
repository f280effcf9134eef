#include "doctest.h"

#include <cmath>
#include <sstream>

#include "missingmass/enumeration.hpp"
#include "missingmass/model.hpp"
#include "oracle.hpp"

using namespace missingmass;

namespace {

// the worked observation vector used across the suite:
// x = [a,a,c,c,c,e,e,f,h,h] over {a..h}
SampleSet fixture_sample() {
  return SampleSet(8, {0, 0, 2, 2, 2, 4, 4, 5, 7, 7});
}

const std::vector<double> kFixtureTheta = {0.1, 0.1, 0.2, 0.1, 0.2, 0.1, 0.1, 0.1};

}  // namespace

TEST_CASE("pmf construction") {
  SUBCASE("uniform") {
    const Pmf p = uniform_pmf(4);
    for (std::size_t m = 0; m < 4; ++m) CHECK(p[m] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("zipf s=0 degenerates to uniform") {
    const Pmf p = zipf_pmf(3, 0.0);
    for (std::size_t m = 0; m < 3; ++m)
      CHECK(std::abs(p[m] - 1.0 / 3.0) <= 1e-15);
  }
  SUBCASE("zipf s=1 normalises (1, 1/2, 1/3)") {
    const Pmf p = zipf_pmf(3, 1.0);
    CHECK(p[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-13));
    CHECK(p[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-13));
    CHECK(p[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
  }
  SUBCASE("invalid explicit vectors name the offending entries") {
    CHECK_THROWS_WITH_AS(Pmf({0.5, 0.5, 0.0}), doctest::Contains("theta[3]"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(Pmf({0.6, 0.6}), doctest::Contains("sum"), std::invalid_argument);
  }
  SUBCASE("round trip through the text format") {
    const Pmf p = zipf_pmf(5, 1.3);
    std::stringstream buf;
    write_pmf(buf, p);
    const Pmf q = read_pmf(buf);
    REQUIRE(q.size() == p.size());
    for (std::size_t m = 0; m < p.size(); ++m) CHECK(q[m] == p[m]);
  }
}

TEST_CASE("sample sets index histograms and occupancy") {
  const SampleSet s = fixture_sample();
  CHECK(s.sample_size() == 10);
  CHECK(s.counts() == std::vector<int>{2, 0, 3, 0, 2, 1, 0, 2});
  CHECK(s.unseen() == std::vector<int>{1, 3, 6});
  CHECK(s.occupancy(1) == std::vector<int>{5});
  CHECK(s.occupancy(2) == std::vector<int>{0, 4, 7});
  CHECK(s.occupancy(3) == std::vector<int>{2});
  CHECK(s.occupancy(4).empty());

  SUBCASE("occupancy sets partition the alphabet and weigh up to N") {
    rng r(11);
    for (int rep = 0; rep < 20; ++rep) {
      const Pmf p = oracle::random_pmf(6, r);
      rng stream = r.derive(rep);
      const SampleSet draw = draw_samples(p, 25, stream);
      std::size_t members = 0;
      int weighted = 0, total = 0;
      for (const auto& [occ, set] : draw.occupancy_sets()) {
        members += set.size();
        weighted += occ * static_cast<int>(set.size());
      }
      for (int c : draw.counts()) total += c;
      CHECK(members == 6);
      CHECK(weighted == 25);
      CHECK(total == 25);
    }
  }
}

TEST_CASE("sampling is deterministic per stream and unbiased") {
  const Pmf p = uniform_pmf(4);
  rng a(42), b(42);
  const SampleSet s1 = draw_samples(p, 1000, a);
  const SampleSet s2 = draw_samples(p, 1000, b);
  CHECK(s1.sequence() == s2.sequence());

  rng big(7);
  const std::size_t n = 1000000;
  const SampleSet s = draw_samples(p, n, big);
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
  for (std::size_t m = 0; m < 4; ++m) {
    const double freq = static_cast<double>(s.count(m)) / static_cast<double>(n);
    CHECK(std::abs(freq - 0.25) <= 3.0 * sigma);
  }
}

TEST_CASE("unseen-event probabilities") {
  CHECK(pr_unobserved(Pmf({0.5, 0.5}), 2, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pr_unobserved(uniform_pmf(4), 3, 2) == doctest::Approx(27.0 / 64.0).epsilon(1e-15));
  CHECK(pr_unobserved(zipf_pmf(3, 1.0), 5, 0) ==
        doctest::Approx(std::pow(5.0 / 11.0, 5)).epsilon(1e-13));
}

TEST_CASE("missing mass and cost") {
  const SampleSet s = fixture_sample();
  const Pmf theta(kFixtureTheta);
  CHECK(missing_mass(theta, s) == doctest::Approx(0.3).epsilon(1e-15));

  SUBCASE("no unseen symbols means zero missing mass") {
    const SampleSet full(3, {0, 1, 2, 0});
    CHECK(missing_mass(uniform_pmf(3), full) == 0.0);
  }
  SUBCASE("uniform M=3 with exactly one unseen symbol") {
    const SampleSet one(3, {0, 1, 0, 1});
    CHECK(missing_mass(uniform_pmf(3), one) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("perfect estimate has zero cost") {
    CHECK(mm_cost(kFixtureTheta, theta, s) == 0.0);
  }
  SUBCASE("zero-on-unseen estimate pays the single missing term") {
    const SampleSet one(3, {0, 1, 0, 1});
    const std::vector<double> est = {0.5, 0.5, 0.0};
    CHECK(mm_cost(est, uniform_pmf(3), one) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  }
  SUBCASE("three-term cost of the equal-share smoother on the fixture") {
    std::vector<double> est(8, 0.0);
    for (int m : s.unseen()) est[static_cast<std::size_t>(m)] = 1.0 / 48.0;
    double expect = 0.0;
    for (int m : s.unseen()) {
      const double d = 1.0 / 48.0 - kFixtureTheta[static_cast<std::size_t>(m)];
      expect += d * d;
    }
    CHECK(mm_cost(est, theta, s) == doctest::Approx(expect).epsilon(1e-15));
  }
  SUBCASE("missing mass stays inside [0,1]") {
    rng r(5);
    for (int rep = 0; rep < 30; ++rep) {
      const Pmf p = oracle::random_pmf(7, r);
      rng stream = r.derive(100 + rep);
      const SampleSet draw = draw_samples(p, 4, stream);
      const double mm = missing_mass(p, draw);
      CHECK(mm >= 0.0);
      CHECK(mm <= 1.0);
    }
  }
}

TEST_CASE("conditional pmf given an unseen symbol") {
  const Pmf p = zipf_pmf(3, 1.0);
  SUBCASE("sequences containing the symbol get zero") {
    const SampleSet s(3, {0, 1, 2});
    CHECK(conditional_pmf_value(p, s, 1) == 0.0);
  }
  SUBCASE("normalises over each conditioning event") {
    for (std::size_t m = 0; m < 3; ++m) {
      double total = 0.0;
      oracle::all_sequences(3, 4, [&](const std::vector<int>& seq) {
        total += conditional_pmf_value(p, SampleSet(3, seq), m);
      });
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
  SUBCASE("forced outcome has conditional probability one") {
    const Pmf half({0.5, 0.5});
    const SampleSet s(2, {0});
    CHECK(conditional_pmf_value(half, s, 1) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("event probabilities match plain sequence sums") {
  // sum of p(x) over sequences missing symbol m equals (1-theta_m)^N
  for (const auto& [m_sym, n] : std::vector<std::pair<int, int>>{{3, 5}, {4, 5}}) {
    const Pmf p = zipf_pmf(static_cast<std::size_t>(m_sym), 0.8);
    for (int m = 0; m < m_sym; ++m) {
      double total = 0.0;
      oracle::all_sequences(m_sym, n, [&](const std::vector<int>& seq) {
        const auto counts = oracle::sequence_counts(m_sym, seq);
        if (counts[static_cast<std::size_t>(m)] == 0)
          total += oracle::sequence_probability(p.values(), seq);
      });
      CHECK(std::abs(total - pr_unobserved(p, static_cast<std::size_t>(n),
                                           static_cast<std::size_t>(m))) <= 1e-12);
    }
  }
}

TEST_CASE("histogram enumeration matches raw sequence enumeration") {
  const Pmf p = zipf_pmf(3, 1.0);
  const int n = 4;
  double direct = 0.0;
  oracle::all_sequences(3, n, [&](const std::vector<int>& seq) {
    const auto counts = oracle::sequence_counts(3, seq);
    double mm = 0.0;
    for (std::size_t m = 0; m < 3; ++m)
      if (counts[m] == 0) mm += p[m];
    direct += oracle::sequence_probability(p.values(), seq) * mm;
  });
  const double via_histograms = exact_expectation(p, n, [&](const std::vector<int>& counts) {
    double mm = 0.0;
    for (std::size_t m = 0; m < 3; ++m)
      if (counts[m] == 0) mm += p[m];
    return mm;
  });
  CHECK(direct == doctest::Approx(via_histograms).epsilon(1e-13));
  CHECK_THROWS_WITH_AS(require_enumeration_feasible(10, 30), doctest::Contains("Monte Carlo"),
                       std::invalid_argument);
}
