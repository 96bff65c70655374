#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "csv.hpp"
#include "divergences.hpp"
#include "generators.hpp"
#include "multinomial.hpp"
#include "risk.hpp"
#include "rng.hpp"
#include "slope.hpp"
#include "subset_select.hpp"
#include "types.hpp"

namespace sparsemnl {

enum class FitMethod { Exhaustive, GroupLasso, GroupSlope };
enum class LambdaKind { Equal, Variable };

inline const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Exhaustive:
      return "exhaustive";
    case FitMethod::GroupLasso:
      return "lasso";
    default:
      return "slope";
  }
}

inline FitMethod fit_method_from_string(const std::string& s) {
  if (s == "exhaustive") return FitMethod::Exhaustive;
  if (s == "lasso") return FitMethod::GroupLasso;
  if (s == "slope") return FitMethod::GroupSlope;
  throw ConfigError("unknown method: " + s);
}

inline const char* to_string(LambdaKind k) {
  return k == LambdaKind::Equal ? "equal" : "variable";
}

inline LambdaKind lambda_kind_from_string(const std::string& s) {
  if (s == "equal") return LambdaKind::Equal;
  if (s == "variable") return LambdaKind::Variable;
  throw ConfigError("unknown lambda kind: " + s);
}

/// One synthetic classification scenario plus the estimator to run on
/// it. Everything downstream (data, fit, risk estimates) is a pure
/// function of this struct.
struct ScenarioConfig {
  int d = 10;
  int d0 = 2;  // rows of B_true that are active; 0 gives the null model
  int L = 3;
  long n = 500;
  double delta = 0.05;
  GeneratorKind generator = GeneratorKind::BoundedUniform;
  double b_scale = 1.0;
  std::uint64_t seed = 1;
  FitMethod method = FitMethod::GroupSlope;
  LambdaKind lambda_kind = LambdaKind::Variable;
  double c0_tune = 2.0;
  double c1 = 2.0;
  double c2 = 2.0;
  long n_mc = 20000;
  int max_size = 0;  // 0: use min(d, floor(n / (L-1)))
  double tol = 1e-6;
  long max_iter = 10000;

  void validate() const {
    if (d < 1) throw ConfigError("config: d must be >= 1");
    if (d0 < 0 || d0 > d) throw ConfigError("config: d0 must be in [0, d]");
    if (L < 2) throw ConfigError("config: L must be >= 2");
    if (n < 1) throw ConfigError("config: n must be >= 1");
    if (!(delta > 0.0) || !(delta < 0.5))
      throw ConfigError("config: delta must be in (0, 1/2)");
    if (!(b_scale >= 0.0) || !std::isfinite(b_scale))
      throw ConfigError("config: b_scale must be >= 0");
    if (!(c0_tune > 0.0) || !std::isfinite(c0_tune))
      throw ConfigError("config: c0_tune must be > 0");
    if (!(c1 > 0.0) || !(c2 > 0.0))
      throw ConfigError("config: c1, c2 must be > 0");
    if (n_mc < 1) throw ConfigError("config: n_mc must be >= 1");
    if (max_size < 0 || max_size > d)
      throw ConfigError("config: max_size must be in [0, d]");
    if (!(tol > 0.0)) throw ConfigError("config: tol must be > 0");
    if (max_iter < 1) throw ConfigError("config: max_iter must be >= 1");
  }

  FeatureGenerator feature_generator() const {
    return FeatureGenerator(generator, d);
  }

  int effective_max_size() const {
    return max_size > 0 ? max_size : default_max_subset_size(d, n, L);
  }
};

/// Ground truth drawn for a config: a d0-row-sparse coefficient matrix,
/// the sampled design, and labels drawn from the implied model.
struct Scenario {
  CoeffMatrix b_true;    // ReferenceLast
  DesignMatrix X;
  LabelVector y;
  std::vector<int> support;  // 1-based rows of b_true that are active
};

namespace detail {

/// Stream tags for deriving independent generators from one seed.
constexpr std::uint64_t kEvalStreamTag = 0x6576616cULL;   // "eval"
constexpr std::uint64_t kSplitStreamTag = 0x73706c74ULL;  // "splt"

}  // namespace detail

/// Build the ground truth for a config. Draw order from Rng(seed):
/// support rows, entry signs, the n x d design, then the labels. Active
/// rows have entries +-b_scale in the first L-1 class columns; if any
/// sampled score |beta_l . x_i| reaches the margin bound
/// ln((1-delta)/delta), the whole matrix is rescaled to 95% of the
/// bound before labels are drawn.
inline Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  // Partial Fisher-Yates: the first d0 slots end up a uniform subset.
  std::vector<int> idx(static_cast<size_t>(cfg.d));
  for (int j = 0; j < cfg.d; ++j) idx[static_cast<size_t>(j)] = j + 1;
  for (int i = 0; i < cfg.d0; ++i) {
    const int j = static_cast<int>(rng.uniform_int(i, cfg.d - 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  std::vector<int> support(idx.begin(), idx.begin() + cfg.d0);
  std::sort(support.begin(), support.end());

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(cfg.d, cfg.L);
  for (int r : support)
    for (int l = 0; l < cfg.L - 1; ++l)
      B(r - 1, l) = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * cfg.b_scale;

  const FeatureGenerator gen = cfg.feature_generator();
  Eigen::MatrixXd X = gen.sample_matrix(rng, cfg.n);

  const double c0 = MarginConfig(cfg.delta).c0();
  for (int attempt = 0; attempt < 5; ++attempt) {
    const double worst =
        B.isZero(0.0) ? 0.0 : (X * B).array().abs().maxCoeff();
    if (worst < c0) break;
    B *= 0.95 * c0 / worst;
  }

  Scenario sc;
  sc.b_true = CoeffMatrix(std::move(B), Convention::ReferenceLast);
  std::vector<int> labels(static_cast<size_t>(cfg.n));
  for (long i = 0; i < cfg.n; ++i) {
    const Eigen::VectorXd p = softmax_probs(sc.b_true, X.row(i).transpose());
    labels[static_cast<size_t>(i)] = rng.categorical(p.data(), cfg.L) + 1;
  }
  sc.X = DesignMatrix(std::move(X));
  sc.y = LabelVector(std::move(labels), cfg.L);
  sc.support = std::move(support);
  return sc;
}

/// Everything measured for one scenario. The config is echoed so a CSV
/// row is self-describing. Wall time is kept for logs but deliberately
/// not serialized: the CSV of a rerun must be byte-identical.
struct ExperimentRecord {
  ScenarioConfig config;
  std::string status = "ok";  // "ok" or a sanitized error message
  std::string fit_status;     // solver-reported convergence tag
  RiskEstimate bayes;
  RiskEstimate excess;
  int support_size = 0;
  int support_tp = 0;
  int support_fp = 0;
  long iterations = 0;
  double residual = 0.0;
  double objective = 0.0;
  double wall_time_ms = 0.0;
};

namespace detail {

inline std::string sanitize_field(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct FitOutcome {
  Eigen::MatrixXd coef;  // d x L scores for the plug-in rule
  ModelSubset support;
  std::string fit_status;
  long iterations = 0;
  double residual = 0.0;
  double objective = 0.0;
};

inline FitOutcome dispatch_fit(const ScenarioConfig& cfg,
                               const DesignMatrix& X, const LabelVector& y) {
  FitOutcome out;
  if (cfg.method == FitMethod::Exhaustive) {
    const PenaltyConfig pen(cfg.c1, cfg.c2, cfg.L, cfg.d);
    const MarginConfig margin(cfg.delta);
    SelectOptions opts;
    opts.newton.max_iter = static_cast<int>(std::min<long>(cfg.max_iter, 1000));
    const SelectionResult res =
        select_model(X, y, pen, margin, cfg.effective_max_size(), opts);
    out.coef = res.coefficients.values;
    out.support = res.chosen;
    out.fit_status =
        res.chosen_fit.converged ? "converged" : "iteration_cap";
    out.iterations = res.chosen_fit.iterations;
    out.residual = res.chosen_fit.grad_residual;
    out.objective = res.chosen_fit.negloglik +
                    penalty(res.chosen.size(), pen);
    return out;
  }

  SlopeOptions opts;
  opts.max_iter = static_cast<int>(cfg.max_iter);
  opts.kkt_tol = cfg.tol;
  SlopeFit fit;
  if (cfg.method == FitMethod::GroupLasso) {
    const LambdaSeq lam = lambda_equal(cfg.d, cfg.L, cfg.n, cfg.c0_tune);
    fit = fit_group_lasso(X, y, lam.values[0], opts);
  } else {
    const LambdaSeq lam = cfg.lambda_kind == LambdaKind::Equal
                              ? lambda_equal(cfg.d, cfg.L, cfg.n, cfg.c0_tune)
                              : lambda_variable(cfg.d, cfg.L, cfg.n,
                                                cfg.c0_tune);
    fit = fit_group_slope(X, y, lam, opts);
  }
  out.coef = fit.coefficients.values;
  out.support = fit.support;
  out.fit_status = to_string(fit.status);
  out.iterations = fit.iterations;
  out.residual = fit.kkt_residual;
  out.objective = fit.objective;
  return out;
}

}  // namespace detail

/// Generate, fit, and score one scenario. Bayes and excess risk use the
/// conditional (Rao-Blackwellized) estimator over a shared feature
/// stream seeded by mix_seed(cfg.seed, "eval"), so the two estimates and
/// any pair of methods on the same config see identical draws. Failures
/// are captured in the status field, never thrown.
inline ExperimentRecord run_experiment(const ScenarioConfig& cfg) {
  ExperimentRecord rec;
  rec.config = cfg;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    cfg.validate();
    const Scenario sc = generate_scenario(cfg);
    const detail::FitOutcome fit = detail::dispatch_fit(cfg, sc.X, sc.y);
    rec.fit_status = fit.fit_status;
    rec.iterations = fit.iterations;
    rec.residual = fit.residual;
    rec.objective = fit.objective;

    const LinearClassifier clf{fit.coef};
    const FeatureGenerator gen = cfg.feature_generator();
    Rng rng(mix_seed(cfg.seed, detail::kEvalStreamTag));
    detail::MeanAccumulator bayes_acc, excess_acc;
    for (long i = 0; i < cfg.n_mc; ++i) {
      const Eigen::VectorXd x = gen(rng);
      const Eigen::VectorXd p = softmax_probs(sc.b_true, x);
      const int lstar = detail::argmax_lowest(p.transpose());
      const int lhat = clf(x) - 1;
      bayes_acc.add(1.0 - p[lstar]);
      excess_acc.add(p[lstar] - p[lhat]);
    }
    rec.bayes = {bayes_acc.mean, bayes_acc.std_error(), cfg.n_mc,
                 RiskMethod::Conditional};
    rec.excess = {excess_acc.mean, excess_acc.std_error(), cfg.n_mc,
                  RiskMethod::Conditional};

    rec.support_size = fit.support.size();
    for (int j : fit.support.features) {
      const bool truly_active =
          std::binary_search(sc.support.begin(), sc.support.end(), j);
      (truly_active ? rec.support_tp : rec.support_fp) += 1;
    }
    rec.status = "ok";
  } catch (const GuardError& e) {
    rec.status = detail::sanitize_field(std::string("guard: ") + e.what());
  } catch (const std::exception& e) {
    rec.status = detail::sanitize_field(std::string("error: ") + e.what());
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return rec;
}

/// One swept parameter and the values it takes, in report order.
struct SweepAxis {
  std::string param;  // one of: n, d, d0, L, c0_tune
  std::vector<double> values;
};

namespace detail {

inline void apply_axis_value(ScenarioConfig& cfg, const std::string& param,
                             double v) {
  auto as_int = [&](long lo) {
    const double r = std::round(v);
    if (!std::isfinite(v) || std::abs(v - r) > 1e-9 || r < double(lo))
      throw ConfigError("sweep: value " + format_double(v) +
                        " invalid for axis " + param);
    return static_cast<long>(r);
  };
  if (param == "n")
    cfg.n = as_int(1);
  else if (param == "d")
    cfg.d = static_cast<int>(as_int(1));
  else if (param == "d0")
    cfg.d0 = static_cast<int>(as_int(0));
  else if (param == "L")
    cfg.L = static_cast<int>(as_int(2));
  else if (param == "c0_tune") {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("sweep: c0_tune values must be positive");
    cfg.c0_tune = v;
  } else {
    throw ConfigError("sweep: unknown axis " + param +
                      " (use n, d, d0, L or c0_tune)");
  }
}

}  // namespace detail

/// Cell seed of a sweep: mix_seed(mix_seed(base_seed, bits(value)),
/// replicate_seed), with bits() the raw IEEE-754 pattern of the value.
inline std::uint64_t sweep_cell_seed(std::uint64_t base_seed, double value,
                                     std::uint64_t replicate_seed) {
  return mix_seed(mix_seed(base_seed, std::bit_cast<std::uint64_t>(value)),
                  replicate_seed);
}

/// Run the cross product axis.values x seeds, in that nesting order.
/// Each cell runs an independent experiment whose config seed is
/// sweep_cell_seed(base.seed, value, replicate); failures land in the
/// record status and do not abort the sweep.
inline std::vector<ExperimentRecord> sweep(const ScenarioConfig& base,
                                           const SweepAxis& axis,
                                           const std::vector<std::uint64_t>& seeds,
                                           int jobs = 1) {
  base.validate();
  if (axis.values.empty()) throw ConfigError("sweep: no axis values");
  if (seeds.empty()) throw ConfigError("sweep: no replicate seeds");

  std::vector<ScenarioConfig> cells;
  cells.reserve(axis.values.size() * seeds.size());
  for (double v : axis.values) {
    ScenarioConfig cfg = base;
    detail::apply_axis_value(cfg, axis.param, v);
    for (std::uint64_t s : seeds) {
      cfg.seed = sweep_cell_seed(base.seed, v, s);
      cells.push_back(cfg);
    }
  }

  std::vector<ExperimentRecord> records(cells.size());
  if (jobs <= 1) {
    for (size_t i = 0; i < cells.size(); ++i)
      records[i] = run_experiment(cells[i]);
  } else {
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
      for (size_t i = cursor.fetch_add(1); i < cells.size();
           i = cursor.fetch_add(1))
        records[i] = run_experiment(cells[i]);
    };
    std::vector<std::thread> pool;
    const int nt = std::min<int>(jobs, static_cast<int>(cells.size()));
    pool.reserve(static_cast<size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

// ---------------------------------------------------------------------
// Record serialization. Column order is frozen; doubles go through
// format_double, so identical in-memory records always produce
// identical bytes.

inline const char* record_csv_header() {
  return "method,lambda,generator,n,d,d0,L,delta,b_scale,c0_tune,c1,c2,"
         "n_mc,max_size,tol,max_iter,seed,status,fit_status,bayes_risk,"
         "bayes_se,excess_risk,excess_se,support_size,support_tp,"
         "support_fp,iterations,residual,objective";
}

inline void write_records_csv(const std::string& path,
                              const std::vector<ExperimentRecord>& records) {
  std::ofstream out = detail::open_out(path);
  out << record_csv_header() << "\n";
  for (const ExperimentRecord& r : records) {
    const ScenarioConfig& c = r.config;
    out << to_string(c.method) << ',' << to_string(c.lambda_kind) << ','
        << to_string(c.generator) << ',' << c.n << ',' << c.d << ',' << c.d0
        << ',' << c.L << ',' << format_double(c.delta) << ','
        << format_double(c.b_scale) << ',' << format_double(c.c0_tune) << ','
        << format_double(c.c1) << ',' << format_double(c.c2) << ',' << c.n_mc
        << ',' << c.max_size << ',' << format_double(c.tol) << ','
        << c.max_iter << ',' << c.seed << ','
        << detail::sanitize_field(r.status) << ','
        << detail::sanitize_field(r.fit_status) << ','
        << format_double(r.bayes.value) << ','
        << format_double(r.bayes.std_error) << ','
        << format_double(r.excess.value) << ','
        << format_double(r.excess.std_error) << ',' << r.support_size << ','
        << r.support_tp << ',' << r.support_fp << ',' << r.iterations << ','
        << format_double(r.residual) << ',' << format_double(r.objective)
        << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

inline std::vector<ExperimentRecord> read_records_csv(
    const std::string& path) {
  std::ifstream in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      detail::split(line, ',') != detail::split(record_csv_header(), ','))
    throw ConfigError("unexpected results header in " + path);
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = detail::split(line, ',');
    if (f.size() != 29)
      throw ConfigError("results row with wrong field count in " + path);
    ExperimentRecord r;
    ScenarioConfig& c = r.config;
    size_t k = 0;
    c.method = fit_method_from_string(f[k++]);
    c.lambda_kind = lambda_kind_from_string(f[k++]);
    c.generator = generator_from_string(f[k++]);
    c.n = detail::parse_long(f[k++], path);
    c.d = static_cast<int>(detail::parse_long(f[k++], path));
    c.d0 = static_cast<int>(detail::parse_long(f[k++], path));
    c.L = static_cast<int>(detail::parse_long(f[k++], path));
    c.delta = detail::parse_double(f[k++], path);
    c.b_scale = detail::parse_double(f[k++], path);
    c.c0_tune = detail::parse_double(f[k++], path);
    c.c1 = detail::parse_double(f[k++], path);
    c.c2 = detail::parse_double(f[k++], path);
    c.n_mc = detail::parse_long(f[k++], path);
    c.max_size = static_cast<int>(detail::parse_long(f[k++], path));
    c.tol = detail::parse_double(f[k++], path);
    c.max_iter = detail::parse_long(f[k++], path);
    c.seed = static_cast<std::uint64_t>(
        std::stoull(f[k++]));
    r.status = f[k++];
    r.fit_status = f[k++];
    r.bayes.value = detail::parse_double(f[k++], path);
    r.bayes.std_error = detail::parse_double(f[k++], path);
    r.excess.value = detail::parse_double(f[k++], path);
    r.excess.std_error = detail::parse_double(f[k++], path);
    r.bayes.n_mc = r.excess.n_mc = c.n_mc;
    r.support_size = static_cast<int>(detail::parse_long(f[k++], path));
    r.support_tp = static_cast<int>(detail::parse_long(f[k++], path));
    r.support_fp = static_cast<int>(detail::parse_long(f[k++], path));
    r.iterations = detail::parse_long(f[k++], path);
    r.residual = detail::parse_double(f[k++], path);
    r.objective = detail::parse_double(f[k++], path);
    out.push_back(std::move(r));
  }
  return out;
}

/// Criterion-table export, semicolon-separated. Subsets render as
/// indices joined by '+', the empty subset as an empty field.
inline void write_criterion_csv(const std::string& path,
                                const std::vector<CriterionRow>& rows) {
  std::ofstream out = detail::open_out(path);
  out << "subset;size;negloglik;penalty;criterion\n";
  for (const CriterionRow& r : rows) {
    std::string sub;
    for (size_t i = 0; i < r.subset.features.size(); ++i) {
      if (i > 0) sub += '+';
      sub += std::to_string(r.subset.features[i]);
    }
    out << sub << ';' << r.subset.size() << ';' << format_double(r.negloglik)
        << ';' << format_double(r.penalty_value) << ';'
        << format_double(r.criterion) << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

// ---------------------------------------------------------------------
// Rate reporting.

struct RateReportRow {
  std::string group;
  RateFit fit;
  int distinct_n = 0;
};

struct RateReport {
  std::vector<RateReportRow> rows;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string group_key(const ExperimentRecord& r,
                             const std::string& by) {
  const ScenarioConfig& c = r.config;
  if (by.empty() || by == "all") return "all";
  if (by == "L") return "L=" + std::to_string(c.L);
  if (by == "d") return "d=" + std::to_string(c.d);
  if (by == "d0") return "d0=" + std::to_string(c.d0);
  if (by == "method") return std::string("method=") + to_string(c.method);
  if (by == "lambda")
    return std::string("lambda=") + to_string(c.lambda_kind);
  if (by == "generator")
    return std::string("generator=") + to_string(c.generator);
  if (by == "c0_tune") return "c0_tune=" + format_double(c.c0_tune);
  throw ConfigError("rate report: unknown group field " + by);
}

}  // namespace detail

/// Per-group power-law fit of mean excess risk against n. Groups are
/// keyed by the group_by config field ("" lumps everything together).
/// Records with a non-ok status are skipped; groups with fewer than
/// three usable distinct sample sizes are excluded with a warning.
inline RateReport rate_report(const std::vector<ExperimentRecord>& records,
                              const std::string& group_by = "") {
  // group -> n -> (sum, count)
  std::map<std::string, std::map<long, std::pair<double, long>>> cells;
  for (const ExperimentRecord& r : records) {
    if (r.status != "ok") continue;
    auto& cell = cells[detail::group_key(r, group_by)][r.config.n];
    cell.first += r.excess.value;
    cell.second += 1;
  }

  RateReport rep;
  for (const auto& [group, by_n] : cells) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, sc] : by_n)
      pts.emplace_back(static_cast<double>(n),
                       sc.first / static_cast<double>(sc.second));
    try {
      RateReportRow row;
      row.group = group;
      row.fit = rate_fit(pts);
      row.distinct_n = static_cast<int>(pts.size());
      rep.rows.push_back(std::move(row));
    } catch (const std::invalid_argument& e) {
      rep.warnings.push_back("group " + group + " excluded: " + e.what());
    }
  }
  if (cells.empty())
    rep.warnings.push_back("no usable records (all rows failed or empty)");
  return rep;
}

inline void write_rates_csv(const std::string& path, const RateReport& rep) {
  std::ofstream out = detail::open_out(path);
  out << "group,slope,intercept,r2,distinct_n\n";
  for (const RateReportRow& row : rep.rows)
    out << detail::sanitize_field(row.group) << ','
        << format_double(row.fit.slope) << ','
        << format_double(row.fit.intercept) << ','
        << format_double(row.fit.r2) << ',' << row.distinct_n << "\n";
  if (!out) throw ConfigError("write failed: " + path);
}

inline void write_rate_report_txt(const std::string& path,
                                  const RateReport& rep) {
  std::ofstream out = detail::open_out(path);
  out << "excess-risk rate report (log-log least squares)\n";
  for (const RateReportRow& row : rep.rows)
    out << "  " << row.group << ": slope " << format_double(row.fit.slope)
        << ", r2 " << format_double(row.fit.r2) << ", "
        << row.distinct_n << " sample sizes\n";
  for (const std::string& w : rep.warnings) out << "  warning: " << w << "\n";
  if (!out) throw ConfigError("write failed: " + path);
}

// ---------------------------------------------------------------------
// Validation-based tuning helpers.

struct TuneResult {
  double best = 0.0;
  double best_error = 0.0;
  /// (candidate, holdout error) in grid order.
  std::vector<std::pair<double, double>> tried;
};

namespace detail {

struct HoldoutSplit {
  DesignMatrix X_train, X_val;
  LabelVector y_train, y_val;
};

inline HoldoutSplit make_holdout(const DesignMatrix& X, const LabelVector& y,
                                 double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  const Eigen::Index n = X.n();
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(mix_seed(seed, kSplitStreamTag));
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const Eigen::Index j = rng.uniform_int(0, i);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  Eigen::Index n_val = static_cast<Eigen::Index>(
      std::llround(fraction * static_cast<double>(n)));
  n_val = std::max<Eigen::Index>(1, std::min<Eigen::Index>(n - 1, n_val));

  auto take = [&](Eigen::Index from, Eigen::Index count, DesignMatrix& Xo,
                  LabelVector& yo) {
    Eigen::MatrixXd M(count, X.d());
    std::vector<int> lab(static_cast<size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) {
      M.row(i) = X.values.row(idx[static_cast<size_t>(from + i)]);
      lab[static_cast<size_t>(i)] =
          y.labels[static_cast<size_t>(idx[static_cast<size_t>(from + i)])];
    }
    Xo = DesignMatrix(std::move(M));
    yo = LabelVector(std::move(lab), y.num_classes);
  };
  HoldoutSplit split;
  take(0, n_val, split.X_val, split.y_val);
  take(n_val, n - n_val, split.X_train, split.y_train);
  return split;
}

inline double misclassification(const LinearClassifier& clf,
                                const DesignMatrix& X, const LabelVector& y) {
  long wrong = 0;
  for (Eigen::Index i = 0; i < X.n(); ++i)
    if (clf(X.values.row(i).transpose()) !=
        y.labels[static_cast<size_t>(i)])
      ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(X.n());
}

}  // namespace detail

/// Pick the penalty level multiplier c0_tune by holdout validation
/// error: fit on the training part for every candidate, score on the
/// holdout, keep the first minimizer in grid order.
inline TuneResult tune_c0_by_validation(const DesignMatrix& X,
                                        const LabelVector& y,
                                        LambdaKind kind,
                                        const std::vector<double>& grid,
                                        double holdout_fraction,
                                        std::uint64_t seed,
                                        const SlopeOptions& opts = {}) {
  if (grid.empty()) throw std::invalid_argument("tune: empty grid");
  const detail::HoldoutSplit split =
      detail::make_holdout(X, y, holdout_fraction, seed);
  const int d = static_cast<int>(X.d());
  const int L = y.num_classes;

  TuneResult res;
  res.best_error = std::numeric_limits<double>::infinity();
  for (double cand : grid) {
    const LambdaSeq lam =
        kind == LambdaKind::Equal
            ? lambda_equal(d, L, split.X_train.n(), cand)
            : lambda_variable(d, L, split.X_train.n(), cand);
    const SlopeFit fit = fit_group_slope(split.X_train, split.y_train, lam,
                                         opts);
    const double err = detail::misclassification(
        LinearClassifier{fit.coefficients.values}, split.X_val, split.y_val);
    res.tried.emplace_back(cand, err);
    if (err < res.best_error) {
      res.best_error = err;
      res.best = cand;
    }
  }
  return res;
}

/// Same holdout scheme for the subset-selection penalty scale
/// c1 = c2 = candidate.
inline TuneResult tune_penalty_scale_by_validation(
    const DesignMatrix& X, const LabelVector& y, const MarginConfig& margin,
    const std::vector<double>& grid, double holdout_fraction,
    std::uint64_t seed, int max_size, const SelectOptions& opts = {}) {
  if (grid.empty()) throw std::invalid_argument("tune: empty grid");
  const detail::HoldoutSplit split =
      detail::make_holdout(X, y, holdout_fraction, seed);
  const int d = static_cast<int>(X.d());

  TuneResult res;
  res.best_error = std::numeric_limits<double>::infinity();
  for (double cand : grid) {
    const PenaltyConfig pen(cand, cand, y.num_classes, d);
    const SelectionResult sel =
        select_model(split.X_train, split.y_train, pen, margin, max_size,
                     opts);
    const double err = detail::misclassification(
        plugin_classifier(sel), split.X_val, split.y_val);
    res.tried.emplace_back(cand, err);
    if (err < res.best_error) {
      res.best_error = err;
      res.best = cand;
    }
  }
  return res;
}

}  // namespace sparsemnl
