/**
 * Risk evaluation: missing-mass MSE and total missing-mass bias of an
 * estimator, by exact histogram enumeration or seeded Monte Carlo.
 *
 * Monte Carlo trials read stream derive(t) of the master seed, and paired
 * comparisons evaluate every estimator on the same draws, so results are
 * reproducible and independent of batching.
 */

#ifndef MISSINGMASS_EVALUATION_HPP
#define MISSINGMASS_EVALUATION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "missingmass/enumeration.hpp"
#include "missingmass/estimators.hpp"
#include "missingmass/model.hpp"
#include "missingmass/rng.hpp"
#include "missingmass/scoring.hpp"

namespace missingmass {

enum class RiskMode { enumerate, monte_carlo };

struct RiskEstimate {
  double mmmse = 0.0;
  double total_bias = 0.0;
  RiskMode mode = RiskMode::enumerate;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mmmse_stderr = 0.0;
  double total_bias_stderr = 0.0;
};

namespace detail {

inline void unseen_cost_and_bias(const std::vector<double>& theta_hat, const Pmf& pmf,
                                 const std::vector<int>& counts, double& cost, double& bias) {
  cost = 0.0;
  bias = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m) {
    if (counts[m] != 0) continue;
    const double d = theta_hat[m] - pmf[m];
    cost += d * d;
    bias += d;
  }
}

}  // namespace detail

/// Exact risk by histogram enumeration; errors out past the state cap.
/// The scoring estimator is admitted with one derived stream per histogram.
inline RiskEstimate evaluate_risk_enumerate(const EstimatorSpec& spec, const Pmf& pmf,
                                            int n_samples, std::uint64_t seed = 0) {
  require_enumeration_feasible(pmf.size(), static_cast<std::size_t>(n_samples));
  RiskEstimate r;
  r.mode = RiskMode::enumerate;
  std::vector<double> theta_hat(pmf.size());
  const bool scoring = spec.kind == EstimatorKind::fisher_scoring;
  rng base(seed);
  std::uint64_t index = 0;
  for_each_histogram(pmf.size(), n_samples, [&](const std::vector<int>& counts) {
    const double w = histogram_probability(pmf, counts, n_samples);
    if (scoring) {
      const SampleSet s = SampleSet::from_counts(pmf.size(), counts);
      theta_hat = estimate_fisher_scoring(s, spec, base.derive(index)).theta_hat;
    } else {
      estimate_theta_on_counts(spec, counts, n_samples, theta_hat);
    }
    double cost, bias;
    detail::unseen_cost_and_bias(theta_hat, pmf, counts, cost, bias);
    r.mmmse += w * cost;
    r.total_bias += w * bias;
    ++index;
  });
  return r;
}

/// Seeded Monte Carlo risk with standard errors from per-trial variance.
inline RiskEstimate evaluate_risk_mc(const EstimatorSpec& spec, const Pmf& pmf, int n_samples,
                                     std::size_t trials, std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("evaluate_risk: need at least 2 trials");
  RiskEstimate r;
  r.mode = RiskMode::monte_carlo;
  r.trials = trials;
  r.seed = seed;
  alias_table table(pmf.values());
  rng base(seed);
  std::vector<int> counts;
  std::vector<double> theta_hat(pmf.size());
  double cost_sum = 0.0, cost_sumsq = 0.0, bias_sum = 0.0, bias_sumsq = 0.0;
  const bool scoring = spec.kind == EstimatorKind::fisher_scoring;
  for (std::size_t t = 0; t < trials; ++t) {
    rng trial = base.derive(t);
    rng draw_stream = trial.derive(0);
    draw_counts(table, static_cast<std::size_t>(n_samples), draw_stream, counts);
    if (scoring) {
      const SampleSet s = SampleSet::from_counts(pmf.size(), counts);
      theta_hat = estimate_fisher_scoring(s, spec, trial.derive(1)).theta_hat;
    } else {
      estimate_theta_on_counts(spec, counts, n_samples, theta_hat);
    }
    double cost, bias;
    detail::unseen_cost_and_bias(theta_hat, pmf, counts, cost, bias);
    cost_sum += cost;
    cost_sumsq += cost * cost;
    bias_sum += bias;
    bias_sumsq += bias * bias;
  }
  const double t = static_cast<double>(trials);
  r.mmmse = cost_sum / t;
  r.total_bias = bias_sum / t;
  r.mmmse_stderr = std::sqrt(std::max(0.0, cost_sumsq / t - r.mmmse * r.mmmse) / t);
  r.total_bias_stderr =
      std::sqrt(std::max(0.0, bias_sumsq / t - r.total_bias * r.total_bias) / t);
  return r;
}

/// Mode-dispatching wrapper mirroring ProfileRequest in bias.hpp.
struct RiskRequest {
  RiskMode mode = RiskMode::monte_carlo;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
};

inline RiskEstimate evaluate_risk(const EstimatorSpec& spec, const Pmf& pmf, int n_samples,
                                  const RiskRequest& req) {
  if (req.mode == RiskMode::enumerate)
    return evaluate_risk_enumerate(spec, pmf, n_samples, req.seed);
  return evaluate_risk_mc(spec, pmf, n_samples, req.trials, req.seed);
}

struct PairedComparison {
  RiskEstimate first;
  RiskEstimate second;
  double delta_mean = 0.0;    // mean of (cost_first - cost_second)
  double delta_stderr = 0.0;  // standard error of the paired mean
  std::vector<double> deltas;
};

/// Both estimators on identical draws; the paired delta cancels the shared
/// sampling noise, which is what makes small improvements measurable.
inline PairedComparison paired_comparison(const EstimatorSpec& spec_a,
                                          const EstimatorSpec& spec_b, const Pmf& pmf,
                                          int n_samples, std::size_t trials,
                                          std::uint64_t seed) {
  if (trials < 2) throw std::invalid_argument("paired_comparison: need at least 2 trials");
  PairedComparison out;
  out.deltas.reserve(trials);
  alias_table table(pmf.values());
  rng base(seed);
  std::vector<int> counts;
  std::vector<double> theta_a(pmf.size()), theta_b(pmf.size());
  double sa = 0, sa2 = 0, sb = 0, sb2 = 0, ba = 0, ba2 = 0, bb = 0, bb2 = 0, sd = 0, sd2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    rng trial = base.derive(t);
    rng draw_stream = trial.derive(0);
    draw_counts(table, static_cast<std::size_t>(n_samples), draw_stream, counts);
    auto eval = [&](const EstimatorSpec& spec, std::uint64_t slot, std::vector<double>& theta) {
      if (spec.kind == EstimatorKind::fisher_scoring) {
        const SampleSet s = SampleSet::from_counts(pmf.size(), counts);
        theta = estimate_fisher_scoring(s, spec, trial.derive(1 + slot)).theta_hat;
      } else {
        estimate_theta_on_counts(spec, counts, n_samples, theta);
      }
    };
    eval(spec_a, 0, theta_a);
    eval(spec_b, 1, theta_b);
    double cost_a, bias_a, cost_b, bias_b;
    detail::unseen_cost_and_bias(theta_a, pmf, counts, cost_a, bias_a);
    detail::unseen_cost_and_bias(theta_b, pmf, counts, cost_b, bias_b);
    const double d = cost_a - cost_b;
    out.deltas.push_back(d);
    sa += cost_a;
    sa2 += cost_a * cost_a;
    sb += cost_b;
    sb2 += cost_b * cost_b;
    ba += bias_a;
    ba2 += bias_a * bias_a;
    bb += bias_b;
    bb2 += bias_b * bias_b;
    sd += d;
    sd2 += d * d;
  }
  const double t = static_cast<double>(trials);
  auto fill = [&](RiskEstimate& r, double cs, double cs2, double bs, double bs2) {
    r.mode = RiskMode::monte_carlo;
    r.trials = trials;
    r.seed = seed;
    r.mmmse = cs / t;
    r.total_bias = bs / t;
    r.mmmse_stderr = std::sqrt(std::max(0.0, cs2 / t - r.mmmse * r.mmmse) / t);
    r.total_bias_stderr = std::sqrt(std::max(0.0, bs2 / t - r.total_bias * r.total_bias) / t);
  };
  fill(out.first, sa, sa2, ba, ba2);
  fill(out.second, sb, sb2, bb, bb2);
  out.delta_mean = sd / t;
  out.delta_stderr = std::sqrt(std::max(0.0, sd2 / t - out.delta_mean * out.delta_mean) / t);
  return out;
}

/**
 * Per-iteration risk of the scoring estimator, paired against its
 * initializer on the same draws. Entry k describes iterate k (0 = the
 * initializer after simplex repair).
 */
struct IterationRisk {
  double mmmse = 0.0;
  double mmmse_stderr = 0.0;
  double total_bias = 0.0;
  double total_bias_stderr = 0.0;
  double delta_vs_init = 0.0;  // mean paired (cost_k - cost_init)
  double delta_stderr = 0.0;
};

inline std::vector<IterationRisk> scoring_iteration_study(const EstimatorSpec& scoring_spec,
                                                          const Pmf& pmf, int n_samples,
                                                          std::size_t trials,
                                                          std::uint64_t seed) {
  if (scoring_spec.kind != EstimatorKind::fisher_scoring || !scoring_spec.init)
    throw std::invalid_argument("scoring_iteration_study: need a scoring spec");
  const std::size_t k_count = static_cast<std::size_t>(scoring_spec.iterations) + 1;
  std::vector<double> cost_sum(k_count, 0.0), cost_sumsq(k_count, 0.0);
  std::vector<double> bias_sum(k_count, 0.0), bias_sumsq(k_count, 0.0);
  std::vector<double> delta_sum(k_count, 0.0), delta_sumsq(k_count, 0.0);
  std::vector<double> init_theta(pmf.size());
  alias_table table(pmf.values());
  rng base(seed);
  std::vector<int> counts;
  for (std::size_t t = 0; t < trials; ++t) {
    rng trial = base.derive(t);
    rng draw_stream = trial.derive(0);
    draw_counts(table, static_cast<std::size_t>(n_samples), draw_stream, counts);
    const SampleSet s = SampleSet::from_counts(pmf.size(), counts);
    const EstimateResult res = estimate_fisher_scoring(s, scoring_spec, trial.derive(1));
    estimate_theta_on_counts(*scoring_spec.init, counts, n_samples, init_theta);
    double init_cost, init_bias;
    detail::unseen_cost_and_bias(init_theta, pmf, counts, init_cost, init_bias);
    for (std::size_t k = 0; k < k_count; ++k) {
      double cost, bias;
      detail::unseen_cost_and_bias(res.trace[k].theta, pmf, counts, cost, bias);
      cost_sum[k] += cost;
      cost_sumsq[k] += cost * cost;
      bias_sum[k] += bias;
      bias_sumsq[k] += bias * bias;
      const double d = cost - init_cost;
      delta_sum[k] += d;
      delta_sumsq[k] += d * d;
    }
  }
  const double t = static_cast<double>(trials);
  std::vector<IterationRisk> out(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    out[k].mmmse = cost_sum[k] / t;
    out[k].mmmse_stderr =
        std::sqrt(std::max(0.0, cost_sumsq[k] / t - out[k].mmmse * out[k].mmmse) / t);
    out[k].total_bias = bias_sum[k] / t;
    out[k].total_bias_stderr =
        std::sqrt(std::max(0.0, bias_sumsq[k] / t - out[k].total_bias * out[k].total_bias) / t);
    out[k].delta_vs_init = delta_sum[k] / t;
    out[k].delta_stderr = std::sqrt(
        std::max(0.0, delta_sumsq[k] / t - out[k].delta_vs_init * out[k].delta_vs_init) / t);
  }
  return out;
}

}  // namespace missingmass

#endif  // MISSINGMASS_EVALUATION_HPP
