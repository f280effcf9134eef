/**
 * Lower bounds on estimation risk under the simplex constraint.
 *
 *  - ccrb_trace: classical constrained Cramer-Rao bound on the total MSE
 *    of chi-unbiased estimators, (1/N) trace((U^T diag^{-1}(theta) U)^{-1}).
 *
 *  - mmccrb: bound on the missing-mass MSE of an estimator with bias
 *    profile (b, S),
 *        trace( (S U) K^{-1} (S U)^T ) + sum_m b_m^2 / (1-theta_m)^N,
 *    with K = U^T J0 U taken through the identity K = N U^T D U. The trace
 *    term follows the covariance-inequality derivation with S in the
 *    E[Gamma Delta^T] orientation used by bias.hpp; this is what makes the
 *    zero-bias case collapse to mmccrb_unbiased for any valid profile.
 *
 *  - mmccrb_unbiased / mmccrb_uniform_closed_form: the zero-bias
 *    specialisation and its uniform-pmf closed form (nominal route).
 *
 * Every bound takes the evaluation point explicitly; nothing here samples.
 */

#ifndef MISSINGMASS_BOUNDS_HPP
#define MISSINGMASS_BOUNDS_HPP

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "missingmass/bias.hpp"
#include "missingmass/information.hpp"
#include "missingmass/linalg.hpp"
#include "missingmass/model.hpp"

namespace missingmass {

enum class BoundKind {
  ccrb,
  mmccrb_general,
  mmccrb_iid,
  mmccrb_unbiased,
  mmccrb_cml,
  mmccrb_uniform_unbiased,
};

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::ccrb: return "ccrb";
    case BoundKind::mmccrb_general: return "mmccrb-general";
    case BoundKind::mmccrb_iid: return "mmccrb";
    case BoundKind::mmccrb_unbiased: return "mmccrb-unbiased";
    case BoundKind::mmccrb_cml: return "mmccrb-cml";
    case BoundKind::mmccrb_uniform_unbiased: return "mmccrb-uniform";
  }
  return "?";
}

struct BoundReport {
  BoundKind kind = BoundKind::ccrb;
  double value = 0.0;
  double trace_term = 0.0;
  double bias_penalty = 0.0;
  std::string provenance = "closed_form";
};

/// (1/N) trace((U^T diag^{-1}(theta) U)^{-1}).
inline BoundReport ccrb_trace(const Pmf& pmf, int n_samples, const mat& u,
                              double cond_cap = 1e12) {
  const std::size_t m_count = pmf.size();
  mat dinv_u = u;  // diag(1/theta) * U
  for (std::size_t i = 0; i < m_count; ++i)
    for (std::size_t j = 0; j < u.cols; ++j) dinv_u(i, j) = u(i, j) / pmf[i];
  const mat b = transpose(u) * dinv_u;
  const mat binv = inverse_sym(b, cond_cap);
  BoundReport r;
  r.kind = BoundKind::ccrb;
  r.trace_term = trace(binv) / static_cast<double>(n_samples);
  r.value = r.trace_term;
  return r;
}

namespace detail {

inline double bias_penalty_term(const vec& b, const Pmf& pmf, int n_samples) {
  double penalty = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m)
    penalty += b[m] * b[m] / pr_unobserved(pmf, static_cast<std::size_t>(n_samples), m);
  return penalty;
}

inline std::string describe_profile(const BiasProfile& p, MmfimRoute route) {
  std::ostringstream out;
  out << "profile=" << profile_mode_name(p.mode);
  if (p.mode == ProfileMode::monte_carlo)
    out << "(samples=" << p.mc_samples << ",seed=" << p.mc_seed << ")";
  out << ";route=" << route_name(route);
  return out.str();
}

}  // namespace detail

/**
 * Missing-mass bound for an estimator with profile (b, S), i.i.d. model.
 * Throws singular_projection_error when the projected information matrix
 * fails the regularity condition (singular or past the condition cap).
 */
inline BoundReport mmccrb(const BiasProfile& profile, const Pmf& pmf, int n_samples,
                          const mat& u, MmfimRoute route = MmfimRoute::exact,
                          double cond_cap = 1e12) {
  if (profile.b.size() != pmf.size() || profile.S.rows != pmf.size())
    throw std::invalid_argument("mmccrb: profile dimensions do not match the pmf");
  const mat k = projected_mmfim(pmf, n_samples, u, route, /*verify=*/false);
  const mat kinv = inverse_sym(k, cond_cap);
  const mat su = profile.S * u;           // M x (M-1)
  const mat su_kinv = su * kinv;          // M x (M-1)
  double trace_term = 0.0;
  for (std::size_t i = 0; i < su.rows; ++i)
    for (std::size_t j = 0; j < su.cols; ++j) trace_term += su_kinv(i, j) * su(i, j);
  BoundReport r;
  r.kind = BoundKind::mmccrb_iid;
  r.trace_term = trace_term;
  r.bias_penalty = detail::bias_penalty_term(profile.b, pmf, n_samples);
  r.value = r.trace_term + r.bias_penalty;
  r.provenance = detail::describe_profile(profile, route);
  return r;
}

/// Same bound with a caller-supplied full information matrix J0.
inline BoundReport mmccrb_general(const BiasProfile& profile, const mat& j0, const Pmf& pmf,
                                  int n_samples, const mat& u, double cond_cap = 1e12) {
  const mat ut = transpose(u);
  const mat k = ut * (j0 * u);
  const mat kinv = inverse_sym(k, cond_cap);
  const mat su = profile.S * u;
  const mat su_kinv = su * kinv;
  double trace_term = 0.0;
  for (std::size_t i = 0; i < su.rows; ++i)
    for (std::size_t j = 0; j < su.cols; ++j) trace_term += su_kinv(i, j) * su(i, j);
  BoundReport r;
  r.kind = BoundKind::mmccrb_general;
  r.trace_term = trace_term;
  r.bias_penalty = detail::bias_penalty_term(profile.b, pmf, n_samples);
  r.value = r.trace_term + r.bias_penalty;
  r.provenance = detail::describe_profile(profile, MmfimRoute::exact) + ";j0=supplied";
  return r;
}

/// Closed form for estimators whose missing-mass bias matches the
/// empirical-frequency estimator: sum_m theta_m^2 (1-theta_m)^N.
inline BoundReport mmccrb_cml(const Pmf& pmf, int n_samples) {
  BoundReport r;
  r.kind = BoundKind::mmccrb_cml;
  double v = 0.0;
  for (std::size_t m = 0; m < pmf.size(); ++m)
    v += pmf[m] * pmf[m] * pr_unobserved(pmf, static_cast<std::size_t>(n_samples), m);
  r.bias_penalty = v;
  r.value = v;
  return r;
}

/**
 * Bound on the missing-mass MSE of estimators with zero missing-mass bias:
 * (1/N) sum_m (1-theta_m)^{2N} [U (U^T D U)^{-1} U^T]_mm, nominal route.
 */
inline BoundReport mmccrb_unbiased(const Pmf& pmf, int n_samples, const mat& u,
                                   double cond_cap = 1e12) {
  const std::size_t m_count = pmf.size();
  const vec d = mmfim_diag_nominal(pmf);
  mat dmat(m_count, m_count);
  for (std::size_t m = 0; m < m_count; ++m) dmat(m, m) = d[m];
  const mat pinv = projected_inverse_quadratic(dmat, u, cond_cap);
  BoundReport r;
  r.kind = BoundKind::mmccrb_unbiased;
  double v = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    const double pr = pr_unobserved(pmf, static_cast<std::size_t>(n_samples), m);
    v += pr * pr * pinv(m, m);
  }
  r.trace_term = v / static_cast<double>(n_samples);
  r.value = r.trace_term;
  return r;
}

/// Uniform-pmf closed form of the zero-bias bound:
/// (1/N) ((M-1)/M)^{2N} (M-1)^3 / (M^4 - 2 M^3). Singular at M = 2.
inline BoundReport mmccrb_uniform_closed_form(int m_symbols, int n_samples) {
  if (m_symbols <= 2)
    throw singular_projection_error(
        std::numeric_limits<double>::infinity(),
        "uniform missing-mass bound is singular for M <= 2 (D vanishes)");
  if (n_samples < 1) throw std::invalid_argument("uniform bound: need N >= 1");
  const double m = static_cast<double>(m_symbols);
  const double n = static_cast<double>(n_samples);
  BoundReport r;
  r.kind = BoundKind::mmccrb_uniform_unbiased;
  r.trace_term = (1.0 / n) * std::pow((m - 1.0) / m, 2.0 * n) * std::pow(m - 1.0, 3.0) /
                 (std::pow(m, 4.0) - 2.0 * std::pow(m, 3.0));
  r.value = r.trace_term;
  return r;
}

/**
 * Per-unseen-symbol error of the bound-achieving estimator at theta:
 * b_m/(1-theta_m)^N + [S U K^{-1} U^T Delta(x)]_mm. The scoring iteration
 * moves each unseen estimate by psi times this quantity.
 */
inline vec efficient_error_expression(const BiasProfile& profile, const Pmf& pmf,
                                      int n_samples, const mat& u, const SampleSet& s,
                                      MmfimRoute route = MmfimRoute::exact,
                                      double cond_cap = 1e12) {
  const mat k = projected_mmfim(pmf, n_samples, u, route, /*verify=*/false);
  const mat kinv = inverse_sym(k, cond_cap);
  const mat w = (profile.S * u) * (kinv * transpose(u));  // M x M
  const mat delta = score_matrix(pmf, s);
  vec out;
  out.reserve(s.unseen().size());
  for (int m : s.unseen()) {
    const std::size_t mu = static_cast<std::size_t>(m);
    double corr = 0.0;
    for (std::size_t l = 0; l < pmf.size(); ++l) corr += w(mu, l) * delta(l, mu);
    const double pr = pr_unobserved(pmf, static_cast<std::size_t>(n_samples), mu);
    out.push_back(profile.b[mu] / pr + corr);
  }
  return out;
}

}  // namespace missingmass

#endif  // MISSINGMASS_BOUNDS_HPP
