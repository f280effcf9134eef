/**
 * Exact expectations over the outcome space of N i.i.d. draws.
 *
 * Every statistic in this project is a function of the histogram, so the
 * expectation over all M^N sequences collapses to a sum over count vectors
 * weighted by multinomial coefficients. Enumeration order is lexicographic
 * and accumulation order fixed, so results are bit-stable run to run.
 */

#ifndef MISSINGMASS_ENUMERATION_HPP
#define MISSINGMASS_ENUMERATION_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "missingmass/model.hpp"

namespace missingmass {

/// Shared cap on exact enumeration: M^N states at most.
constexpr double kEnumerationStateCap = 2e6;

inline bool enumeration_feasible(std::size_t m_symbols, std::size_t n_samples) {
  return std::pow(static_cast<double>(m_symbols), static_cast<double>(n_samples)) <=
         kEnumerationStateCap;
}

inline void require_enumeration_feasible(std::size_t m_symbols, std::size_t n_samples) {
  if (!enumeration_feasible(m_symbols, n_samples))
    throw std::invalid_argument(
        "exact enumeration infeasible: M^N exceeds state cap; use Monte Carlo mode");
}

inline double log_factorial(int n) {
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// N! / prod_m c_m!  for a count vector with sum N.
inline double multinomial_coefficient(const std::vector<int>& counts, int n_samples) {
  double lg = log_factorial(n_samples);
  for (int c : counts) lg -= log_factorial(c);
  return std::exp(lg);
}

/// Probability of observing exactly this histogram under the pmf.
inline double histogram_probability(const Pmf& pmf, const std::vector<int>& counts,
                                    int n_samples) {
  double logp = log_factorial(n_samples);
  for (std::size_t m = 0; m < counts.size(); ++m) {
    logp -= log_factorial(counts[m]);
    if (counts[m] > 0) logp += counts[m] * std::log(pmf[m]);
  }
  return std::exp(logp);
}

/**
 * Visit every count vector (c_1..c_M) with sum N, in lexicographic order.
 * The visitor receives the counts; it must not keep the reference.
 */
template <typename Visitor>
void for_each_histogram(std::size_t m_symbols, int n_samples, Visitor&& visit) {
  std::vector<int> counts(m_symbols, 0);
  // recursive lexicographic fill, last symbol absorbs the remainder
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
    if (pos + 1 == m_symbols) {
      counts[pos] = remaining;
      visit(const_cast<const std::vector<int>&>(counts));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      rec(pos + 1, remaining - c);
    }
  };
  rec(0, n_samples);
}

/**
 * E[f(histogram)] computed exactly. The visitor returns the per-histogram
 * statistic; weights are the multinomial probabilities under the pmf.
 */
template <typename Statistic>
double exact_expectation(const Pmf& pmf, int n_samples, Statistic&& f) {
  require_enumeration_feasible(pmf.size(), static_cast<std::size_t>(n_samples));
  double acc = 0.0;
  for_each_histogram(pmf.size(), n_samples, [&](const std::vector<int>& counts) {
    acc += histogram_probability(pmf, counts, n_samples) * f(counts);
  });
  return acc;
}

}  // namespace missingmass

#endif  // MISSINGMASS_ENUMERATION_HPP
