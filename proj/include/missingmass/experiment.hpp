/**
 * Declarative experiments: a config names a pmf family, a sweep over M or
 * N, estimators, and bounds; the runner produces a flat table of rows
 *
 *   name,sweep_var,sweep_value,quantity,series,value,stderr,provenance,error
 *
 * and static SVG plots. Runs are deterministic for a fixed seed: every
 * sweep point works from a derived seed, so identical configs give
 * byte-identical CSV output.
 *
 * Config files are plain key = value lines under [section] headers; '#'
 * starts a comment. See configs/ for the built-in presets.
 */

#ifndef MISSINGMASS_EXPERIMENT_HPP
#define MISSINGMASS_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "missingmass/bounds.hpp"
#include "missingmass/evaluation.hpp"
#include "missingmass/svg.hpp"

namespace missingmass {

struct PmfSpec {
  enum class Kind { uniform, zipf, explicit_values, file } kind = Kind::uniform;
  double skew = 1.0;
  std::vector<double> values;
  std::string path;

  Pmf instantiate(int m_symbols) const {
    switch (kind) {
      case Kind::uniform:
        return uniform_pmf(static_cast<std::size_t>(m_symbols));
      case Kind::zipf:
        return zipf_pmf(static_cast<std::size_t>(m_symbols), skew);
      case Kind::explicit_values:
        return Pmf(values);
      case Kind::file: {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("pmf file not readable: " + path);
        return read_pmf(in);
      }
    }
    throw std::logic_error("unreachable");
  }

  std::string describe() const {
    switch (kind) {
      case Kind::uniform: return "uniform";
      case Kind::zipf: {
        std::ostringstream o;
        o << "zipf:s=" << skew;
        return o.str();
      }
      case Kind::explicit_values: return "explicit";
      case Kind::file: return "file:" + path;
    }
    return "?";
  }
};

struct BoundEntry {
  BoundKind kind = BoundKind::ccrb;
  std::optional<EstimatorSpec> estimator;  // for estimator-bias bounds
  std::string series_name() const {
    if (estimator) return std::string(bound_kind_name(kind)) + "[" + estimator->name() + "]";
    return bound_kind_name(kind);
  }
};

inline BoundEntry parse_bound_entry(const std::string& text) {
  BoundEntry e;
  if (text == "ccrb") {
    e.kind = BoundKind::ccrb;
  } else if (text == "mmccrb-unbiased") {
    e.kind = BoundKind::mmccrb_unbiased;
  } else if (text == "mmccrb-cml") {
    e.kind = BoundKind::mmccrb_cml;
  } else if (text == "mmccrb-uniform") {
    e.kind = BoundKind::mmccrb_uniform_unbiased;
  } else if (text.rfind("mmccrb-bias:", 0) == 0) {
    e.kind = BoundKind::mmccrb_iid;
    e.estimator = parse_estimator_spec(text.substr(std::string("mmccrb-bias:").size()));
    if (e.estimator->kind == EstimatorKind::fisher_scoring)
      throw std::invalid_argument(
          "mmccrb-bias: the scoring estimator has no tractable profile; bound its "
          "initializer instead");
  } else {
    throw std::invalid_argument("unknown bound kind '" + text + "'");
  }
  return e;
}

struct ExperimentConfig {
  std::string name = "experiment";
  PmfSpec pmf;
  char sweep_var = 'N';  // 'M' or 'N'
  std::vector<int> sweep_values;
  int fixed_m = 0;  // used when sweeping N
  int fixed_n = 0;  // used when sweeping M
  std::vector<EstimatorSpec> estimators;
  std::vector<BoundEntry> bounds;
  std::size_t trials = 10000;
  std::size_t profile_samples = 10000;  // Monte Carlo budget for bias profiles
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
};

struct ResultRow {
  int sweep_value = 0;
  std::string quantity;  // mmmse | total_bias | bound_value
  std::string series;
  double value = 0.0;
  double stderr_ = 0.0;
  bool has_stderr = false;
  std::string provenance;
  std::string error;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
};

// ---------------------------------------------------------------------------
// config file parsing
// ---------------------------------------------------------------------------

namespace detail {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline std::map<std::string, std::map<std::string, std::string>> parse_ini(
    std::istream& in, std::string* err_context) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    sections[section][key] = val;
    if (err_context) *err_context = section + "." + key;
  }
  return sections;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (!tok.empty() && tok.back() == ',') tok.pop_back();
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

/// Comma-separated list of specs. Spec options themselves contain commas
/// (fisher:init=...,K=5), so a fragment opens a new item only when it
/// starts with a known head; otherwise it re-attaches to the previous one.
inline std::vector<std::string> split_spec_list(const std::string& s,
                                                const std::vector<std::string>& heads) {
  std::vector<std::string> out;
  for (const std::string& item : split(s, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    bool starts_new = false;
    for (const std::string& h : heads)
      if (t == h || t.rfind(h + ":", 0) == 0) starts_new = true;
    if (starts_new || out.empty())
      out.push_back(t);
    else
      out.back() += "," + t;
  }
  return out;
}

inline const std::vector<std::string>& estimator_heads() {
  static const std::vector<std::string> heads = {"cml", "good-turing", "add-constant",
                                                 "fisher"};
  return heads;
}

inline const std::vector<std::string>& bound_heads() {
  static const std::vector<std::string> heads = {"ccrb", "mmccrb-unbiased", "mmccrb-cml",
                                                 "mmccrb-uniform", "mmccrb-bias"};
  return heads;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::istream& in) {
  std::string ctx;
  const auto sections = detail::parse_ini(in, &ctx);
  ExperimentConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    auto s = sections.find(sec);
    if (s == sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  };

  if (auto v = get("experiment", "name")) cfg.name = *v;
  if (auto v = get("experiment", "trials")) cfg.trials = static_cast<std::size_t>(std::stoll(*v));
  if (auto v = get("experiment", "profile_samples"))
    cfg.profile_samples = static_cast<std::size_t>(std::stoll(*v));
  if (auto v = get("experiment", "seed")) {
    cfg.seed = static_cast<std::uint64_t>(std::stoull(*v));
    cfg.seed_set = true;
  }
  if (!cfg.seed_set)
    throw detail::ConfigError("config: [experiment] seed is mandatory (no wall-clock seeding)");

  const std::string kind = get("pmf", "kind").value_or("uniform");
  if (kind == "uniform") {
    cfg.pmf.kind = PmfSpec::Kind::uniform;
  } else if (kind == "zipf") {
    cfg.pmf.kind = PmfSpec::Kind::zipf;
    cfg.pmf.skew = std::stod(get("pmf", "s").value_or("1"));
  } else if (kind == "explicit") {
    cfg.pmf.kind = PmfSpec::Kind::explicit_values;
    const std::string vals = get("pmf", "values").value_or("");
    std::istringstream vs(vals);
    double x;
    while (vs >> x) cfg.pmf.values.push_back(x);
    if (cfg.pmf.values.empty())
      throw detail::ConfigError("config: [pmf] values required for explicit pmf");
  } else if (kind == "file") {
    cfg.pmf.kind = PmfSpec::Kind::file;
    cfg.pmf.path = get("pmf", "path").value_or("");
    if (cfg.pmf.path.empty()) throw detail::ConfigError("config: [pmf] path required");
  } else {
    throw detail::ConfigError("config: [pmf] kind must be uniform|zipf|explicit|file");
  }
  if (auto v = get("pmf", "M")) cfg.fixed_m = std::stoi(*v);

  const std::string over = get("sweep", "over").value_or("N");
  if (over != "M" && over != "N")
    throw detail::ConfigError("config: [sweep] over must be M or N");
  cfg.sweep_var = over[0];
  cfg.sweep_values = detail::parse_int_list(get("sweep", "values").value_or(""));
  if (cfg.sweep_values.empty())
    throw detail::ConfigError("config: [sweep] values must be a non-empty list");
  if (auto v = get("sweep", "N")) cfg.fixed_n = std::stoi(*v);
  if (auto v = get("sweep", "M")) cfg.fixed_m = std::stoi(*v);
  if (cfg.sweep_var == 'M' && cfg.fixed_n <= 0)
    throw detail::ConfigError("config: sweeping M requires a fixed N in [sweep]");
  if (cfg.sweep_var == 'N' && cfg.fixed_m <= 0 &&
      cfg.pmf.kind != PmfSpec::Kind::explicit_values && cfg.pmf.kind != PmfSpec::Kind::file)
    throw detail::ConfigError("config: sweeping N requires M in [pmf]");

  for (const std::string& s : detail::split_spec_list(get("estimators", "list").value_or(""),
                                                      detail::estimator_heads()))
    cfg.estimators.push_back(parse_estimator_spec(s));
  for (const std::string& s : detail::split_spec_list(get("bounds", "list").value_or(""),
                                                      detail::bound_heads()))
    cfg.bounds.push_back(parse_bound_entry(s));
  if (cfg.estimators.empty() && cfg.bounds.empty())
    throw detail::ConfigError("config: nothing to do (no estimators, no bounds)");

  if (auto v = get("output", "dir")) cfg.out_dir = *v;
  return cfg;
}

// ---------------------------------------------------------------------------
// runner
// ---------------------------------------------------------------------------

namespace detail {

inline std::string mc_provenance(std::size_t trials, std::uint64_t seed) {
  std::ostringstream o;
  o << "monte_carlo(trials=" << trials << ",seed=" << seed << ")";
  return o.str();
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult out;
  out.config = cfg;
  for (std::size_t idx = 0; idx < cfg.sweep_values.size(); ++idx) {
    const int sv = cfg.sweep_values[idx];
    const int m_symbols = cfg.sweep_var == 'M' ? sv : cfg.fixed_m;
    const int n_samples = cfg.sweep_var == 'N' ? sv : cfg.fixed_n;
    const std::uint64_t point_seed = rng(cfg.seed).derive(idx).next_u64();

    Pmf pmf = cfg.pmf.instantiate(m_symbols);
    if (static_cast<int>(pmf.size()) != m_symbols && cfg.sweep_var == 'M')
      throw std::invalid_argument("explicit pmf cannot be swept over M");
    const mat u = nullspace_basis(pmf.size());

    auto push = [&](const std::string& quantity, const std::string& series, double value,
                    double se, bool has_se, const std::string& prov, const std::string& err) {
      ResultRow row;
      row.sweep_value = sv;
      row.quantity = quantity;
      row.series = series;
      row.value = value;
      row.stderr_ = se;
      row.has_stderr = has_se;
      row.provenance = prov;
      row.error = err;
      out.rows.push_back(row);
    };

    for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
      const EstimatorSpec& spec = cfg.estimators[ei];
      const std::uint64_t est_seed = rng(point_seed).derive(ei).next_u64();
      const std::string prov = detail::mc_provenance(cfg.trials, est_seed);
      if (spec.kind == EstimatorKind::fisher_scoring) {
        const auto study =
            scoring_iteration_study(spec, pmf, n_samples, cfg.trials, est_seed);
        // k=0 is the initializer on the same draws: the paired baseline
        for (std::size_t k = 0; k < study.size(); ++k) {
          std::ostringstream series;
          series << spec.name() << "[k=" << k << "]";
          push("mmmse", series.str(), study[k].mmmse, study[k].mmmse_stderr, true, prov, "");
          push("total_bias", series.str(), study[k].total_bias, study[k].total_bias_stderr,
               true, prov, "");
        }
        const auto& last = study.back();
        push("mmmse", spec.name(), last.mmmse, last.mmmse_stderr, true, prov, "");
        push("total_bias", spec.name(), last.total_bias, last.total_bias_stderr, true, prov,
             "");
      } else {
        const RiskEstimate risk =
            evaluate_risk_mc(spec, pmf, n_samples, cfg.trials, est_seed);
        push("mmmse", spec.name(), risk.mmmse, risk.mmmse_stderr, true, prov, "");
        push("total_bias", spec.name(), risk.total_bias, risk.total_bias_stderr, true, prov,
             "");
      }
    }

    for (std::size_t bi = 0; bi < cfg.bounds.size(); ++bi) {
      const BoundEntry& entry = cfg.bounds[bi];
      const std::uint64_t bound_seed = rng(point_seed).derive(1000 + bi).next_u64();
      try {
        BoundReport report;
        std::string prov = "closed_form";
        switch (entry.kind) {
          case BoundKind::ccrb:
            report = ccrb_trace(pmf, n_samples, u);
            break;
          case BoundKind::mmccrb_unbiased:
            report = mmccrb_unbiased(pmf, n_samples, u);
            break;
          case BoundKind::mmccrb_cml:
            report = mmccrb_cml(pmf, n_samples);
            break;
          case BoundKind::mmccrb_uniform_unbiased:
            report = mmccrb_uniform_closed_form(m_symbols, n_samples);
            break;
          case BoundKind::mmccrb_iid:
          case BoundKind::mmccrb_general: {
            BiasProfile profile =
                entry.estimator->kind == EstimatorKind::cml
                    ? bias_cml(pmf, n_samples)
                    : bias_monte_carlo(*entry.estimator, pmf, n_samples, cfg.profile_samples,
                                       rng(bound_seed));
            profile.mc_seed = bound_seed;
            report = mmccrb(profile, pmf, n_samples, u, MmfimRoute::exact);
            prov = report.provenance;
            break;
          }
        }
        push("bound_value", entry.series_name(), report.value, 0.0, false, prov, "");
      } catch (const singular_projection_error& e) {
        push("bound_value", entry.series_name(), std::nan(""), 0.0, false, "closed_form",
             e.what());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV + plots
// ---------------------------------------------------------------------------

inline void write_csv(std::ostream& out, const RunResult& result) {
  out << "name,sweep_var,sweep_value,quantity,series,value,stderr,provenance,error\n";
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "NA";
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  for (const ResultRow& r : result.rows) {
    std::string series = r.series;
    for (char& c : series)
      if (c == ',') c = ';';  // estimator names may carry option lists
    std::string error = r.error;
    for (char& c : error)
      if (c == ',' || c == '\n') c = ';';
    out << result.config.name << ',' << result.config.sweep_var << ',' << r.sweep_value << ','
        << r.quantity << ',' << series << ',' << num(r.value) << ','
        << (r.has_stderr ? num(r.stderr_) : "") << ',' << r.provenance << ',' << error
        << '\n';
  }
}

/// One plot per metric kind; bound curves are overlaid (dashed) on the
/// mmmse panel. Returns the written file paths.
inline std::vector<std::string> emit_plots(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;

  auto collect = [&](const std::string& quantity) {
    std::vector<PlotSeries> series;
    for (const ResultRow& r : result.rows) {
      if (r.quantity != quantity || !r.error.empty()) continue;
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const PlotSeries& s) { return s.label == r.series; });
      if (it == series.end()) {
        series.push_back({r.series, {}, {}, quantity == "bound_value"});
        it = series.end() - 1;
      }
      it->x.push_back(static_cast<double>(r.sweep_value));
      it->y.push_back(r.value);
    }
    return series;
  };

  const std::string xlab = std::string(1, result.config.sweep_var);
  {
    PlotSpec spec;
    spec.title = result.config.name + ": missing-mass MSE (" +
                 result.config.pmf.describe() + ")";
    spec.x_label = xlab;
    spec.y_label = "mmMSE";
    spec.log_y = true;
    spec.series = collect("mmmse");
    for (PlotSeries& b : collect("bound_value")) spec.series.push_back(b);
    if (!spec.series.empty()) {
      const std::string path = (fs::path(dir) / "mmmse.svg").string();
      std::ofstream f(path, std::ios::binary);
      write_svg_plot(f, spec);
      written.push_back(path);
    }
  }
  {
    PlotSpec spec;
    spec.title = result.config.name + ": total missing-mass bias (" +
                 result.config.pmf.describe() + ")";
    spec.x_label = xlab;
    spec.y_label = "total bias";
    spec.series = collect("total_bias");
    if (!spec.series.empty()) {
      const std::string path = (fs::path(dir) / "total_bias.svg").string();
      std::ofstream f(path, std::ios::binary);
      write_svg_plot(f, spec);
      written.push_back(path);
    }
  }
  return written;
}

/// Run, persist CSV + SVG under cfg.out_dir (or the MMEST_OUT_DIR override).
inline RunResult run_and_persist(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  ExperimentConfig effective = cfg;
  if (const char* env = std::getenv("MMEST_OUT_DIR")) {
    effective.out_dir = (fs::path(env) / cfg.name).string();
  }
  RunResult result = run_experiment(effective);
  fs::create_directories(effective.out_dir);
  const std::string csv_path =
      (fs::path(effective.out_dir) / (effective.name + ".csv")).string();
  std::ofstream csv(csv_path, std::ios::binary);
  write_csv(csv, result);
  emit_plots(result, effective.out_dir);
  return result;
}

// ---------------------------------------------------------------------------
// built-in presets
// ---------------------------------------------------------------------------

inline ExperimentConfig preset_fig1() {
  ExperimentConfig cfg;
  cfg.name = "fig1";
  cfg.pmf.kind = PmfSpec::Kind::uniform;
  cfg.sweep_var = 'M';
  cfg.sweep_values = {5, 10, 15, 20, 30, 40, 60, 80, 100};
  cfg.fixed_n = 30;
  cfg.estimators = {parse_estimator_spec("cml"), parse_estimator_spec("good-turing"),
                    parse_estimator_spec("add-constant:c=1")};
  cfg.bounds = {parse_bound_entry("ccrb"), parse_bound_entry("mmccrb-unbiased")};
  cfg.seed = 1;
  cfg.seed_set = true;
  cfg.out_dir = "out/fig1";
  return cfg;
}

inline ExperimentConfig preset_fig2() {
  ExperimentConfig cfg;
  cfg.name = "fig2";
  cfg.pmf.kind = PmfSpec::Kind::zipf;
  cfg.pmf.skew = 1.0;
  cfg.fixed_m = 15;
  cfg.sweep_var = 'N';
  cfg.sweep_values = {10, 20, 30, 40, 60, 80, 100};
  cfg.estimators = {parse_estimator_spec("cml"), parse_estimator_spec("good-turing"),
                    parse_estimator_spec("add-constant:c=1")};
  cfg.bounds = {parse_bound_entry("ccrb"), parse_bound_entry("mmccrb-unbiased"),
                parse_bound_entry("mmccrb-cml"), parse_bound_entry("mmccrb-bias:good-turing"),
                parse_bound_entry("mmccrb-bias:add-constant:c=1")};
  cfg.seed = 2;
  cfg.seed_set = true;
  cfg.out_dir = "out/fig2";
  return cfg;
}

inline ExperimentConfig preset_fig3() {
  ExperimentConfig cfg;
  cfg.name = "fig3";
  cfg.pmf.kind = PmfSpec::Kind::zipf;
  cfg.pmf.skew = 1.0;
  cfg.fixed_m = 15;
  cfg.sweep_var = 'N';
  cfg.sweep_values = {20, 40, 80};
  cfg.estimators = {parse_estimator_spec("add-constant:c=1"),
                    parse_estimator_spec("fisher:init=add-constant:c=1,K=5,psi=1/N,mc=2000")};
  cfg.bounds = {parse_bound_entry("mmccrb-bias:add-constant:c=1")};
  cfg.seed = 3;
  cfg.seed_set = true;
  cfg.out_dir = "out/fig3";
  return cfg;
}

inline std::optional<ExperimentConfig> preset_by_name(const std::string& name) {
  if (name == "fig1") return preset_fig1();
  if (name == "fig2") return preset_fig2();
  if (name == "fig3") return preset_fig3();
  return std::nullopt;
}

}  // namespace missingmass

#endif  // MISSINGMASS_EXPERIMENT_HPP
