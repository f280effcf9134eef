/**
 * Pmf estimators: constrained maximum likelihood (empirical frequencies),
 * smoothed Good-Turing, add-constant smoothing, and the spec of the
 * iterative scoring estimator (implemented in scoring.hpp).
 *
 * Good-Turing and add-constant define the probability assigned to unseen
 * symbols; the mass given to seen symbols is a completion convention
 * (scaled empirical / pseudo-count proportional) chosen so the estimate is
 * a valid pmf. The missing-mass risk and bounds only read unseen entries,
 * so the completion never changes those numbers.
 */

#ifndef MISSINGMASS_ESTIMATORS_HPP
#define MISSINGMASS_ESTIMATORS_HPP

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "missingmass/model.hpp"

namespace missingmass {

enum class EstimatorKind { cml, good_turing, add_constant, fisher_scoring };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::cml;

  // add_constant
  double add_c = 1.0;

  // good_turing: normalizer N' (0 means "use N") and the choice of numerator
  // occupancy count: singletons |G_{N,1}| (default) or unseen |G_{N,0}|.
  double gt_normalizer = 0.0;
  bool gt_unseen_numerator = false;

  // fisher_scoring
  std::shared_ptr<const EstimatorSpec> init;
  int iterations = 5;
  double step = std::numeric_limits<double>::quiet_NaN();  // NaN means psi = 1/N
  int mc_samples = 2000;

  std::string name() const;
};

struct EstimateResult {
  std::vector<double> theta_hat;
  std::vector<int> unseen;            // ascending symbol indices with count 0
  std::vector<double> unseen_values;  // aligned with `unseen`
  double unseen_total = 0.0;

  struct Iteration {
    std::vector<double> theta;
    int repairs = 0;  // clamped entries during simplex repair
  };
  std::vector<Iteration> trace;  // scoring iterates only
};

/**
 * Histogram-level evaluation of the closed-form estimators; this is the hot
 * path for Monte Carlo and enumeration, so it takes preallocated output and
 * never touches occupancy maps.
 */
inline void estimate_theta_on_counts(const EstimatorSpec& spec, const std::vector<int>& counts,
                                     int n_samples, std::vector<double>& theta_out) {
  const std::size_t m_symbols = counts.size();
  const double n = static_cast<double>(n_samples);
  theta_out.resize(m_symbols);
  switch (spec.kind) {
    case EstimatorKind::cml: {
      for (std::size_t m = 0; m < m_symbols; ++m)
        theta_out[m] = static_cast<double>(counts[m]) / n;
      return;
    }
    case EstimatorKind::good_turing: {
      std::size_t g0 = 0, g1 = 0;
      for (int c : counts) {
        if (c == 0) ++g0;
        if (c == 1) ++g1;
      }
      if (g0 == 0) {
        for (std::size_t m = 0; m < m_symbols; ++m)
          theta_out[m] = static_cast<double>(counts[m]) / n;
        return;
      }
      const double nprime = spec.gt_normalizer > 0.0 ? spec.gt_normalizer : n;
      const std::size_t t = spec.gt_unseen_numerator ? g0 : g1;
      double total = std::max<double>(static_cast<double>(t), 1.0) / nprime;
      if (total > 1.0) total = 1.0;
      const double share = total / static_cast<double>(g0);
      const double leftover = 1.0 - total;
      for (std::size_t m = 0; m < m_symbols; ++m)
        theta_out[m] =
            counts[m] == 0 ? share : leftover * static_cast<double>(counts[m]) / n;
      return;
    }
    case EstimatorKind::add_constant: {
      const double c = spec.add_c;
      std::size_t g0 = 0;
      for (int cc : counts)
        if (cc == 0) ++g0;
      const double total =
          c / (n + c * (static_cast<double>(m_symbols) - static_cast<double>(g0) + 1.0));
      if (g0 == 0) {
        const double z = n + c * static_cast<double>(m_symbols);
        for (std::size_t m = 0; m < m_symbols; ++m) theta_out[m] = (counts[m] + c) / z;
        return;
      }
      const double share = total / static_cast<double>(g0);
      double z = 0.0;
      for (std::size_t m = 0; m < m_symbols; ++m)
        if (counts[m] > 0) z += counts[m] + c;
      const double leftover = 1.0 - total;
      for (std::size_t m = 0; m < m_symbols; ++m)
        theta_out[m] = counts[m] == 0 ? share : leftover * (counts[m] + c) / z;
      return;
    }
    case EstimatorKind::fisher_scoring:
      throw std::invalid_argument("scoring estimator requires a random stream; use estimate()");
  }
}

namespace detail {

inline EstimateResult package_result(const EstimatorSpec& spec, const SampleSet& s) {
  EstimateResult r;
  estimate_theta_on_counts(spec, s.counts(), static_cast<int>(s.sample_size()), r.theta_hat);
  r.unseen = s.unseen();
  r.unseen_values.reserve(r.unseen.size());
  for (int m : r.unseen) {
    r.unseen_values.push_back(r.theta_hat[static_cast<std::size_t>(m)]);
    r.unseen_total += r.theta_hat[static_cast<std::size_t>(m)];
  }
  return r;
}

}  // namespace detail

/// theta_hat[m] = C_m / N. Unseen symbols get exactly zero.
inline EstimateResult estimate_cml(const SampleSet& s) {
  EstimatorSpec spec;
  spec.kind = EstimatorKind::cml;
  return detail::package_result(spec, s);
}

/**
 * Smoothed Good-Turing. Total unseen mass is phi(t)/N' with phi(t)=max{t,1},
 * where t is the singleton count by default, split equally over the unseen
 * set; seen symbols keep empirical frequencies rescaled to the leftover
 * mass. With no unseen symbols the total is zero and the estimate reduces
 * to the empirical frequencies.
 */
inline EstimateResult estimate_good_turing(const SampleSet& s, const EstimatorSpec& spec) {
  return detail::package_result(spec, s);
}

/**
 * Add-constant smoothing with pseudo-count c > 0 (c = 1 is the Laplace
 * estimator). Total unseen mass c/(N + c(M - |G0| + 1)) split equally over
 * the unseen set; seen symbols share the leftover proportionally to C_m + c.
 * With no unseen symbols the vector is pseudo-count proportional while the
 * scalar missing-mass estimate stays defined.
 */
inline EstimateResult estimate_add_constant(const SampleSet& s, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("add-constant: need c > 0");
  EstimatorSpec spec;
  spec.kind = EstimatorKind::add_constant;
  spec.add_c = c;
  EstimateResult r = detail::package_result(spec, s);
  if (r.unseen.empty()) {
    const double n = static_cast<double>(s.sample_size());
    r.unseen_total = c / (n + c * (static_cast<double>(s.num_symbols()) + 1.0));
  }
  return r;
}

// ---------------------------------------------------------------------------
// spec strings: cml | good-turing[:k=v,...] | add-constant:c=1 |
//               fisher:init=<spec>,K=5,psi=1/N,mc=2000
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace detail

inline EstimatorSpec parse_estimator_spec(const std::string& text) {
  const std::string spec_text = detail::trim(text);
  const auto colon = spec_text.find(':');
  const std::string head = detail::trim(spec_text.substr(0, colon));
  const std::string tail =
      colon == std::string::npos ? "" : spec_text.substr(colon + 1);

  EstimatorSpec spec;
  auto parse_options = [&](auto&& handle) {
    if (tail.empty()) return;
    for (const std::string& raw : detail::split(tail, ',')) {
      const std::string item = detail::trim(raw);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      const std::string key = detail::trim(item.substr(0, eq));
      const std::string val = eq == std::string::npos ? "" : detail::trim(item.substr(eq + 1));
      handle(key, val);
    }
  };

  if (head == "cml") {
    spec.kind = EstimatorKind::cml;
    if (!tail.empty()) throw std::invalid_argument("estimator 'cml' takes no options");
  } else if (head == "good-turing") {
    spec.kind = EstimatorKind::good_turing;
    parse_options([&](const std::string& key, const std::string& val) {
      if (key == "nprime") {
        spec.gt_normalizer = (val == "N") ? 0.0 : std::stod(val);
        if (val != "N" && !(spec.gt_normalizer > 0.0))
          throw std::invalid_argument("good-turing: nprime must be positive or 'N'");
      } else if (key == "numerator") {
        if (val == "unseen")
          spec.gt_unseen_numerator = true;
        else if (val == "singletons")
          spec.gt_unseen_numerator = false;
        else
          throw std::invalid_argument("good-turing: numerator must be singletons|unseen");
      } else {
        throw std::invalid_argument("good-turing: unknown option '" + key + "'");
      }
    });
  } else if (head == "add-constant") {
    spec.kind = EstimatorKind::add_constant;
    parse_options([&](const std::string& key, const std::string& val) {
      if (key == "c") {
        spec.add_c = std::stod(val);
        if (!(spec.add_c > 0.0)) throw std::invalid_argument("add-constant: need c > 0");
      } else {
        throw std::invalid_argument("add-constant: unknown option '" + key + "'");
      }
    });
  } else if (head == "fisher") {
    spec.kind = EstimatorKind::fisher_scoring;
    bool have_init = false;
    parse_options([&](const std::string& key, const std::string& val) {
      if (key == "init") {
        EstimatorSpec init = parse_estimator_spec(val);
        if (init.kind == EstimatorKind::fisher_scoring)
          throw std::invalid_argument("fisher: nested fisher init not supported");
        spec.init = std::make_shared<EstimatorSpec>(std::move(init));
        have_init = true;
      } else if (key == "K") {
        spec.iterations = std::stoi(val);
        if (spec.iterations < 1) throw std::invalid_argument("fisher: need K >= 1");
      } else if (key == "psi") {
        spec.step = (val == "1/N") ? std::numeric_limits<double>::quiet_NaN() : std::stod(val);
        if (val != "1/N" && !(spec.step >= 0.0))
          throw std::invalid_argument("fisher: psi must be nonnegative or '1/N'");
      } else if (key == "mc") {
        spec.mc_samples = std::stoi(val);
        if (spec.mc_samples < 1) throw std::invalid_argument("fisher: need mc >= 1");
      } else {
        throw std::invalid_argument("fisher: unknown option '" + key + "'");
      }
    });
    if (!have_init) throw std::invalid_argument("fisher: missing init=<estimator>");
  } else {
    throw std::invalid_argument("unknown estimator '" + head + "'");
  }
  return spec;
}

inline std::string EstimatorSpec::name() const {
  std::ostringstream out;
  switch (kind) {
    case EstimatorKind::cml:
      out << "cml";
      break;
    case EstimatorKind::good_turing:
      out << "good-turing";
      if (gt_normalizer > 0.0) out << ":nprime=" << gt_normalizer;
      if (gt_unseen_numerator) out << (gt_normalizer > 0.0 ? "," : ":") << "numerator=unseen";
      break;
    case EstimatorKind::add_constant:
      out << "add-constant:c=" << add_c;
      break;
    case EstimatorKind::fisher_scoring:
      out << "fisher:init=" << (init ? init->name() : "?") << ",K=" << iterations << ",psi=";
      if (std::isnan(step))
        out << "1/N";
      else
        out << step;
      out << ",mc=" << mc_samples;
      break;
  }
  return out.str();
}

/// Dispatch for the closed-form estimators; scoring needs randomness and
/// lives in scoring.hpp (see estimate() there).
inline EstimateResult estimate_closed_form(const EstimatorSpec& spec, const SampleSet& s) {
  switch (spec.kind) {
    case EstimatorKind::cml:
      return estimate_cml(s);
    case EstimatorKind::good_turing:
      return estimate_good_turing(s, spec);
    case EstimatorKind::add_constant:
      return estimate_add_constant(s, spec.add_c);
    case EstimatorKind::fisher_scoring:
      throw std::invalid_argument("scoring estimator requires a random stream; use estimate()");
  }
  throw std::logic_error("unreachable");
}

}  // namespace missingmass

#endif  // MISSINGMASS_ESTIMATORS_HPP
