// Command-line front end: scenario generation, fitting, risk evaluation,
// parameter sweeps, and rate reports over the library in
// include/sparsemnl. Exit codes: 0 success, 1 bad input or I/O, 2 a
// resource guard refused the run.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sparsemnl/config_io.hpp"
#include "sparsemnl/sparsemnl.hpp"

namespace {

using namespace sparsemnl;

/// Optional per-flag overrides layered on top of --config. Only flags
/// the user actually passed are applied.
struct Overrides {
  std::optional<int> d, d0, L, max_size;
  std::optional<long> n, n_mc, max_iter;
  std::optional<double> delta, b_scale, c0_tune, c1, c2, tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> generator, method, lambda;

  void attach(CLI::App* cmd) {
    cmd->add_option("--d", d, "number of features");
    cmd->add_option("--d0", d0, "active rows of the true coefficients");
    cmd->add_option("--classes", L, "number of classes");
    cmd->add_option("--n", n, "sample size");
    cmd->add_option("--delta", delta, "noise floor in (0, 1/2)");
    cmd->add_option("--generator", generator,
                    "feature law: uniform|gaussian|truncated");
    cmd->add_option("--b-scale", b_scale, "entry magnitude of the truth");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--method", method, "slope|lasso|exhaustive");
    cmd->add_option("--lambda", lambda, "weight sequence: equal|variable");
    cmd->add_option("--c0-tune", c0_tune, "lambda level multiplier");
    cmd->add_option("--c1", c1, "penalty constant c1");
    cmd->add_option("--c2", c2, "penalty constant c2");
    cmd->add_option("--n-mc", n_mc, "Monte Carlo draws for risk estimates");
    cmd->add_option("--max-size", max_size,
                    "subset size cap for exhaustive search (0 = auto)");
    cmd->add_option("--tol", tol, "solver convergence tolerance");
    cmd->add_option("--max-iter", max_iter, "solver iteration cap");
  }

  void apply(ScenarioConfig& cfg) const {
    if (d) cfg.d = *d;
    if (d0) cfg.d0 = *d0;
    if (L) cfg.L = *L;
    if (n) cfg.n = *n;
    if (delta) cfg.delta = *delta;
    if (generator) cfg.generator = generator_from_string(*generator);
    if (b_scale) cfg.b_scale = *b_scale;
    if (seed) cfg.seed = *seed;
    if (method) cfg.method = fit_method_from_string(*method);
    if (lambda) cfg.lambda_kind = lambda_kind_from_string(*lambda);
    if (c0_tune) cfg.c0_tune = *c0_tune;
    if (c1) cfg.c1 = *c1;
    if (c2) cfg.c2 = *c2;
    if (n_mc) cfg.n_mc = *n_mc;
    if (max_size) cfg.max_size = *max_size;
    if (tol) cfg.tol = *tol;
    if (max_iter) cfg.max_iter = *max_iter;
  }
};

ScenarioConfig resolve_config(const std::optional<std::string>& config_path,
                              const Overrides& over) {
  ScenarioConfig cfg;
  if (config_path) cfg = load_config(*config_path);
  over.apply(cfg);
  cfg.validate();
  return cfg;
}

int cmd_gen(const std::optional<std::string>& config_path,
            const Overrides& over, const std::string& out,
            const std::optional<std::string>& truth_out) {
  const ScenarioConfig cfg = resolve_config(config_path, over);
  const Scenario sc = generate_scenario(cfg);
  write_dataset(out, sc.X, sc.y);
  if (truth_out) write_coeff(*truth_out, sc.b_true);
  std::cout << "wrote " << sc.X.n() << " rows, " << sc.X.d()
            << " features, " << sc.y.num_classes << " classes to " << out
            << "\n";
  return 0;
}

int cmd_fit(const std::optional<std::string>& config_path,
            const Overrides& over, const std::string& data_path,
            const std::string& out,
            const std::optional<std::string>& criterion_out,
            const std::vector<double>& c0_grid,
            const std::vector<double>& penalty_grid, double holdout) {
  ScenarioConfig cfg;
  if (config_path) cfg = load_config(*config_path);
  over.apply(cfg);

  const auto [X, y] = read_dataset(data_path, over.L.value_or(0));
  cfg.d = static_cast<int>(X.d());
  cfg.n = X.n();
  cfg.L = y.num_classes;
  cfg.validate();

  if (cfg.method == FitMethod::Exhaustive) {
    const MarginConfig margin(cfg.delta);
    double scale_c1 = cfg.c1, scale_c2 = cfg.c2;
    if (!penalty_grid.empty()) {
      const TuneResult tuned = tune_penalty_scale_by_validation(
          X, y, margin, penalty_grid, holdout, cfg.seed,
          cfg.effective_max_size());
      scale_c1 = scale_c2 = tuned.best;
      std::cout << "penalty scale " << format_double(tuned.best)
                << " chosen by holdout error "
                << format_double(tuned.best_error) << "\n";
    }
    const PenaltyConfig pen(scale_c1, scale_c2, cfg.L, cfg.d);
    const SelectionResult res =
        select_model(X, y, pen, margin, cfg.effective_max_size());
    write_coeff(out, res.coefficients);
    if (criterion_out) write_criterion_csv(*criterion_out, res.table);
    std::cout << "chosen subset:";
    for (int j : res.chosen.features) std::cout << " " << j;
    if (res.chosen.features.empty()) std::cout << " (empty)";
    std::cout << "\nnegloglik " << format_double(res.chosen_fit.negloglik)
              << ", criterion "
              << format_double(res.chosen_fit.negloglik +
                               penalty(res.chosen.size(), pen))
              << ", " << (res.chosen_fit.converged ? "converged"
                                                   : "iteration cap hit")
              << "\n";
    return 0;
  }

  SlopeOptions opts;
  opts.max_iter = static_cast<int>(cfg.max_iter);
  opts.kkt_tol = cfg.tol;
  double c0 = cfg.c0_tune;
  if (!c0_grid.empty()) {
    const TuneResult tuned = tune_c0_by_validation(
        X, y, cfg.lambda_kind, c0_grid, holdout, cfg.seed, opts);
    c0 = tuned.best;
    std::cout << "c0_tune " << format_double(c0)
              << " chosen by holdout error "
              << format_double(tuned.best_error) << "\n";
  }

  SlopeFit fit;
  if (cfg.method == FitMethod::GroupLasso) {
    const LambdaSeq lam = lambda_equal(cfg.d, cfg.L, cfg.n, c0);
    fit = fit_group_lasso(X, y, lam.values[0], opts);
  } else {
    const LambdaSeq lam = cfg.lambda_kind == LambdaKind::Equal
                              ? lambda_equal(cfg.d, cfg.L, cfg.n, c0)
                              : lambda_variable(cfg.d, cfg.L, cfg.n, c0);
    fit = fit_group_slope(X, y, lam, opts);
  }
  write_coeff(out, fit.coefficients);
  std::cout << "status " << to_string(fit.status) << ", objective "
            << format_double(fit.objective) << ", kkt "
            << format_double(fit.kkt_residual) << ", iterations "
            << fit.iterations << "\nsupport size " << fit.support.size()
            << ":";
  for (int j : fit.support.features) std::cout << " " << j;
  std::cout << "\n";
  return 0;
}

int cmd_eval(const std::string& data_path, const std::string& coef_path,
             int classes, const std::optional<std::string>& truth_path,
             const std::string& generator, long n_mc, std::uint64_t seed) {
  const auto [X, y] = read_dataset(data_path, classes);
  const CoeffMatrix B = read_coeff(coef_path);
  if (B.dim() != X.d())
    throw ConfigError("eval: coefficient rows do not match data features");
  if (B.classes() != y.num_classes)
    throw ConfigError("eval: coefficient columns do not match data classes");

  const LinearClassifier clf{B.values};
  long wrong = 0;
  for (Eigen::Index i = 0; i < X.n(); ++i)
    if (clf(X.values.row(i).transpose()) != y.labels[static_cast<size_t>(i)])
      ++wrong;
  std::cout << "error_rate "
            << format_double(static_cast<double>(wrong) /
                             static_cast<double>(X.n()))
            << "\nnegloglik " << format_double(-log_likelihood(B, X, y))
            << "\n";

  if (truth_path) {
    const CoeffMatrix Bt = read_coeff(*truth_path);
    if (Bt.dim() != X.d() || Bt.classes() != y.num_classes)
      throw ConfigError("eval: truth coefficients do not match data shape");
    const FeatureGenerator gen(generator_from_string(generator),
                               static_cast<int>(X.d()));
    const auto bayes =
        bayes_risk(Bt, gen, n_mc, mix_seed(seed, detail::kEvalStreamTag));
    const auto excess = excess_risk(clf, Bt, gen, n_mc,
                                    mix_seed(seed, detail::kEvalStreamTag));
    std::cout << "bayes_risk " << format_double(bayes.value) << " se "
              << format_double(bayes.std_error) << "\nexcess_risk "
              << format_double(excess.value) << " se "
              << format_double(excess.std_error) << "\n";
  }
  return 0;
}

int cmd_sweep(const std::optional<std::string>& config_path,
              const Overrides& over, const std::string& axis_name,
              const std::vector<double>& values,
              const std::vector<std::uint64_t>& seeds, int jobs,
              const std::string& out) {
  const ScenarioConfig base = resolve_config(config_path, over);
  const SweepAxis axis{axis_name, values};
  const std::vector<ExperimentRecord> records = sweep(base, axis, seeds, jobs);
  write_records_csv(out, records);
  long failed = 0;
  for (const auto& r : records)
    if (r.status != "ok") ++failed;
  std::cout << "wrote " << records.size() << " records to " << out;
  if (failed > 0) std::cout << " (" << failed << " failed cells)";
  std::cout << "\n";
  return 0;
}

int cmd_rate_fit(const std::string& in, const std::string& group_by,
                 const std::optional<std::string>& report_path,
                 const std::optional<std::string>& rates_path) {
  const std::vector<ExperimentRecord> records = read_records_csv(in);
  const RateReport rep = rate_report(records, group_by);
  for (const RateReportRow& row : rep.rows)
    std::cout << row.group << ": slope " << format_double(row.fit.slope)
              << ", intercept " << format_double(row.fit.intercept)
              << ", r2 " << format_double(row.fit.r2) << " ("
              << row.distinct_n << " sample sizes)\n";
  for (const std::string& w : rep.warnings)
    std::cout << "warning: " << w << "\n";
  if (report_path) write_rate_report_txt(*report_path, rep);
  if (rates_path) write_rates_csv(*rates_path, rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse multinomial logistic classification toolbox"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  std::optional<std::string> gen_config;
  Overrides gen_over;
  std::string gen_out;
  std::optional<std::string> gen_truth;
  gen->add_option("--config", gen_config, "JSON config file");
  gen_over.attach(gen);
  gen->add_option("--out", gen_out, "dataset CSV path")->required();
  gen->add_option("--truth-out", gen_truth,
                  "also write the true coefficients here");

  // fit
  auto* fit = app.add_subcommand("fit", "fit coefficients to a dataset");
  std::optional<std::string> fit_config;
  Overrides fit_over;
  std::string fit_data, fit_out;
  std::optional<std::string> fit_criterion;
  std::vector<double> fit_c0_grid, fit_penalty_grid;
  double fit_holdout = 0.2;
  fit->add_option("--config", fit_config, "JSON config file");
  fit_over.attach(fit);
  fit->add_option("--data", fit_data, "dataset CSV")->required();
  fit->add_option("--out", fit_out, "coefficient CSV path")->required();
  fit->add_option("--criterion-out", fit_criterion,
                  "criterion table path (exhaustive method only)");
  fit->add_option("--c0-grid", fit_c0_grid,
                  "tune c0_tune over these values by holdout validation")
      ->delimiter(',');
  fit->add_option("--penalty-grid", fit_penalty_grid,
                  "tune c1=c2 over these values by holdout validation")
      ->delimiter(',');
  fit->add_option("--holdout", fit_holdout,
                  "holdout fraction for tuning (default 0.2)");

  // eval
  auto* ev = app.add_subcommand("eval", "score coefficients on a dataset");
  std::string ev_data, ev_coef, ev_generator = "uniform";
  std::optional<std::string> ev_truth;
  int ev_classes = 0;
  long ev_n_mc = 100000;
  std::uint64_t ev_seed = 1;
  ev->add_option("--data", ev_data, "dataset CSV")->required();
  ev->add_option("--coef", ev_coef, "coefficient CSV")->required();
  ev->add_option("--classes", ev_classes, "class count override");
  ev->add_option("--truth", ev_truth,
                 "true coefficient CSV; adds Monte Carlo risk estimates");
  ev->add_option("--generator", ev_generator,
                 "feature law for the risk estimates");
  ev->add_option("--n-mc", ev_n_mc, "Monte Carlo draws");
  ev->add_option("--seed", ev_seed, "Monte Carlo seed");

  // sweep
  auto* sw = app.add_subcommand("sweep", "run an experiment grid");
  std::optional<std::string> sw_config;
  Overrides sw_over;
  std::string sw_axis, sw_out;
  std::vector<double> sw_values;
  std::vector<std::uint64_t> sw_seeds;
  int sw_jobs = 1;
  sw->add_option("--config", sw_config, "JSON config file");
  sw_over.attach(sw);
  sw->add_option("--axis", sw_axis, "swept parameter: n|d|d0|L|c0_tune")
      ->required();
  sw->add_option("--values", sw_values, "axis values")
      ->required()
      ->delimiter(',');
  sw->add_option("--seeds", sw_seeds, "replicate seeds")
      ->required()
      ->delimiter(',');
  sw->add_option("--jobs", sw_jobs, "worker threads");
  sw->add_option("--out", sw_out, "results CSV path")->required();

  // rate-fit
  auto* rf = app.add_subcommand("rate-fit", "fit risk decay rates");
  std::string rf_in, rf_group;
  std::optional<std::string> rf_report, rf_rates;
  rf->add_option("--in", rf_in, "results CSV from sweep")->required();
  rf->add_option("--group-by", rf_group,
                 "config field to group by (default: all records)");
  rf->add_option("--report", rf_report, "text report path");
  rf->add_option("--rates", rf_rates, "rates CSV path");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen(gen_config, gen_over, gen_out, gen_truth);
    if (fit->parsed())
      return cmd_fit(fit_config, fit_over, fit_data, fit_out, fit_criterion,
                     fit_c0_grid, fit_penalty_grid, fit_holdout);
    if (ev->parsed())
      return cmd_eval(ev_data, ev_coef, ev_classes, ev_truth, ev_generator,
                      ev_n_mc, ev_seed);
    if (sw->parsed())
      return cmd_sweep(sw_config, sw_over, sw_axis, sw_values, sw_seeds,
                       sw_jobs, sw_out);
    if (rf->parsed()) return cmd_rate_fit(rf_in, rf_group, rf_report, rf_rates);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const sparsemnl::GuardError& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
