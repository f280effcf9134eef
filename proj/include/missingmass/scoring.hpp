/**
 * Iterative scoring estimator for unseen-symbol probabilities.
 *
 * Each iteration moves the unseen entries of the current iterate by psi
 * times the bound-achieving error expression evaluated at the iterate,
 * taken in the bias-correcting direction: the efficiency identity
 * theta_hat_m - theta_m = e*_m(x; theta) is read as an estimating equation
 * for theta with the initializer's output as data, so the step is
 * theta^(k) = theta^(k-1) - psi e*(x; theta^(k-1)). The initializer's bias
 * profile is re-estimated by fresh Monte Carlo draws at each iterate. Seen
 * entries only change through the simplex repair that keeps the iterate a
 * valid pmf.
 */

#ifndef MISSINGMASS_SCORING_HPP
#define MISSINGMASS_SCORING_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "missingmass/bias.hpp"
#include "missingmass/bounds.hpp"
#include "missingmass/estimators.hpp"
#include "missingmass/model.hpp"
#include "missingmass/rng.hpp"

namespace missingmass {

namespace detail {

constexpr double kIterateFloor = 1e-9;

/// Clamp to the positivity floor and rescale the seen block so the vector
/// sums to one. Returns the number of clamped entries.
inline int simplex_repair(std::vector<double>& theta, const SampleSet& s) {
  int repairs = 0;
  for (double& t : theta)
    if (t < kIterateFloor) {
      t = kIterateFloor;
      ++repairs;
    }
  double unseen_sum = 0.0, seen_sum = 0.0;
  for (std::size_t m = 0; m < theta.size(); ++m)
    (s.is_unseen(m) ? unseen_sum : seen_sum) += theta[m];
  const double leftover = 1.0 - unseen_sum;
  if (seen_sum > 0.0 && leftover > kIterateFloor * static_cast<double>(theta.size())) {
    const double scale = leftover / seen_sum;
    for (std::size_t m = 0; m < theta.size(); ++m)
      if (!s.is_unseen(m)) theta[m] *= scale;
  } else {
    // unseen mass swallowed (almost) everything; fall back to a global rescale
    const double total = unseen_sum + seen_sum;
    for (double& t : theta) t /= total;
    ++repairs;
  }
  return repairs;
}

}  // namespace detail

/**
 * Scoring iteration started from spec.init. The stream drives the inner
 * Monte Carlo profile estimation; results are deterministic for a fixed
 * stream. Propagates singular_projection_error if the projected
 * information matrix degenerates at some iterate.
 */
inline EstimateResult estimate_fisher_scoring(const SampleSet& s, const EstimatorSpec& spec,
                                              rng stream) {
  if (spec.kind != EstimatorKind::fisher_scoring || !spec.init)
    throw std::invalid_argument("estimate_fisher_scoring: spec is not a scoring spec");
  const int n = static_cast<int>(s.sample_size());
  const double psi =
      std::isnan(spec.step) ? 1.0 / static_cast<double>(n) : spec.step;
  const mat u = nullspace_basis(s.num_symbols());

  EstimateResult result = estimate_closed_form(*spec.init, s);
  std::vector<double> theta = result.theta_hat;
  int repairs0 = detail::simplex_repair(theta, s);
  result.trace.push_back({theta, repairs0});

  for (int k = 1; k <= spec.iterations; ++k) {
    const Pmf at(theta);
    const BiasProfile profile =
        bias_monte_carlo(*spec.init, at, n, static_cast<std::size_t>(spec.mc_samples),
                         stream.derive(static_cast<std::uint64_t>(k)), /*with_stderr=*/false);
    const vec err = efficient_error_expression(profile, at, n, u, s, MmfimRoute::exact);
    const auto& unseen = s.unseen();
    for (std::size_t i = 0; i < unseen.size(); ++i)
      theta[static_cast<std::size_t>(unseen[i])] -= psi * err[i];
    const int repairs = detail::simplex_repair(theta, s);
    result.trace.push_back({theta, repairs});
  }

  result.theta_hat = theta;
  result.unseen = s.unseen();
  result.unseen_values.clear();
  result.unseen_total = 0.0;
  for (int m : result.unseen) {
    result.unseen_values.push_back(theta[static_cast<std::size_t>(m)]);
    result.unseen_total += theta[static_cast<std::size_t>(m)];
  }
  return result;
}

/// Full dispatcher; the stream is consumed only by the scoring estimator.
inline EstimateResult estimate(const EstimatorSpec& spec, const SampleSet& s, rng stream) {
  if (spec.kind == EstimatorKind::fisher_scoring) return estimate_fisher_scoring(s, spec, stream);
  return estimate_closed_form(spec, s);
}

}  // namespace missingmass

#endif  // MISSINGMASS_SCORING_HPP
