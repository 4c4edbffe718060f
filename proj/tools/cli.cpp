#include "cli.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stpls/cross_validation.hpp"
#include "stpls/csv.hpp"
#include "stpls/error.hpp"
#include "stpls/model_io.hpp"
#include "stpls/simulation.hpp"

namespace stpls::cli {

namespace fs = std::filesystem;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const std::vector<std::string> kMethods{"pls1", "pls2", "xypls", "sparse-twoblock"};

struct CommonArgs {
  std::string x;
  std::string y;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::string scaling = "center";
};

struct EstimatorArgs {
  std::string method;
  int g = 1;
  int h = 1;
  double eta = 0.0;
  double kappa = 0.0;
  std::vector<int> h_list;
};

struct GridArgs {
  int folds = 10;
  std::vector<int> g_grid{1, 2, 3};
  std::vector<int> h_grid{1, 2, 3, 4, 5};
  std::vector<double> eta_grid{0.0, 0.25, 0.5, 0.75};
  std::vector<double> kappa_grid{0.0, 0.25, 0.5, 0.75};
  bool no_shuffle = false;
  std::string score = "mean-mse";
};

struct SimulateArgs {
  Index n = 100;
  std::vector<int> p1_grid{100, 150, 200};
  int p2 = 200;
  int q1 = 3;
  int q2 = 2;
  int h_true = 3;
  double noise_sd = 0.1;
  int runs = 100;
  std::vector<std::string> estimators{"sparse-twoblock", "pls2"};
  int g = 1;
  int h = 3;
  double eta = 0.5;
  double kappa = 0.5;
  int pls_h = 3;
};

struct CompareArgs {
  std::string x_test;
  std::string y_test;
  std::vector<std::string> methods = kMethods;
};

void add_common(CLI::App* sub, CommonArgs& c, bool needs_y) {
  sub->add_option("--x", c.x, "Predictor CSV (header row, numeric cells)")
      ->required()
      ->check(CLI::ExistingFile);
  if (needs_y) {
    sub->add_option("--y", c.y, "Response CSV, same row order as --x")
        ->required()
        ->check(CLI::ExistingFile);
  }
  sub->add_option("--out", c.out, "Output directory (created if missing)")->capture_default_str();
  sub->add_option("--seed", c.seed, "Seed for fold shuffling / simulation")->capture_default_str();
  sub->add_option("--scaling", c.scaling, "Block preprocessing")
      ->check(CLI::IsMember({"center", "autoscale"}))
      ->capture_default_str();
}

void add_grid(CLI::App* sub, GridArgs& g) {
  sub->add_option("--folds", g.folds, "Number of CV folds")->capture_default_str();
  sub->add_option("--g-grid", g.g_grid, "Candidate response component counts")->delimiter(',');
  sub->add_option("--h-grid", g.h_grid, "Candidate predictor component counts")->delimiter(',');
  sub->add_option("--eta-grid", g.eta_grid, "Candidate predictor sparsities")->delimiter(',');
  sub->add_option("--kappa-grid", g.kappa_grid, "Candidate response sparsities")->delimiter(',');
  sub->add_flag("--no-shuffle", g.no_shuffle, "Assign folds in row order");
  sub->add_option("--cv-score", g.score, "Fold score aggregation")
      ->check(CLI::IsMember({"mean-mse", "standardized-mean-mse"}))
      ->capture_default_str();
}

CvConfig make_cv_config(const GridArgs& g, const CommonArgs& c) {
  CvConfig cfg;
  cfg.folds = g.folds;
  cfg.g_grid = g.g_grid;
  cfg.h_grid = g.h_grid;
  cfg.eta_grid = g.eta_grid;
  cfg.kappa_grid = g.kappa_grid;
  cfg.seed = c.seed;
  cfg.shuffle = !g.no_shuffle;
  cfg.score = parse_cv_score(g.score);
  cfg.scaling = parse_scaling(c.scaling);
  return cfg;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::io_failure, "cannot create output directory " + dir);
  }
  return fs::path(dir);
}

VectorXd per_response_mse(const MatrixXd& actual, const MatrixXd& predicted) {
  return (actual - predicted).colwise().squaredNorm().transpose() / static_cast<double>(actual.rows());
}

// 1 − SSE/SST with SST about the mean of `actual`.
VectorXd per_response_r2(const MatrixXd& actual, const MatrixXd& predicted) {
  VectorXd out(actual.cols());
  for (Index k = 0; k < actual.cols(); ++k) {
    const double mean = actual.col(k).mean();
    const double sst = (actual.col(k).array() - mean).square().sum();
    const double sse = (actual.col(k) - predicted.col(k)).squaredNorm();
    out(k) = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
  }
  return out;
}

std::string describe(Method method, const GridPoint& pt) {
  std::ostringstream s;
  switch (method) {
    case Method::pls1:
    case Method::pls2:
      s << "h=" << pt.h;
      break;
    case Method::xypls:
      s << "g=" << pt.g << ", h=" << pt.h;
      break;
    case Method::sparse_twoblock:
      s << "g=" << pt.g << ", h=" << pt.h << ", eta=" << pt.eta << ", kappa=" << pt.kappa;
      break;
  }
  return s.str();
}

std::string describe_pls1(const std::vector<CvReport>& reports) {
  std::string s = "h=";
  for (std::size_t k = 0; k < reports.size(); ++k) s += (k ? "," : "") + std::to_string(reports[k].best.h);
  return s;
}

std::string selection_csv(const TwoblockModel& model) {
  std::string out = "block,variable,selected\n";
  const auto xs = nonzero_rows(model.W);
  for (std::size_t j = 0; j < xs.size(); ++j) out += "X," + model.x_names[j] + "," + (xs[j] ? "1" : "0") + "\n";
  const auto ys = nonzero_rows(model.V);
  for (std::size_t k = 0; k < ys.size(); ++k) out += "Y," + model.y_names[k] + "," + (ys[k] ? "1" : "0") + "\n";
  return out;
}

void warn_if_truncated(const AnyModel& model, std::ostream& err) {
  if (const auto* tb = std::get_if<TwoblockModel>(&model)) {
    if (tb->truncated()) {
      err << "warning: residual vanished; fitted g=" << tb->achieved_g() << " (asked " << tb->hyper.g
          << "), h=" << tb->achieved_h() << " (asked " << tb->hyper.h << ")\n";
    }
  } else if (const auto* pls = std::get_if<PlsModel>(&model)) {
    if (pls->truncated()) {
      err << "warning: residual vanished; fitted h=" << pls->n_components() << " (asked "
          << pls->requested_components << ")\n";
    }
  } else {
    for (const auto& m : std::get<Pls1Set>(model).models) {
      if (m.truncated()) {
        err << "warning: " << m.y_names.at(0) << ": fitted h=" << m.n_components() << " (asked "
            << m.requested_components << ")\n";
      }
    }
  }
}

std::string fit_summary_csv(const AnyModel& model, const DataMatrix& x, const DataMatrix& y) {
  const MatrixXd fitted = predict(model, x).values;
  const VectorXd r2 = per_response_r2(y.values, fitted);
  const VectorXd mse = per_response_mse(y.values, fitted);
  std::string out = "response,train_r2,train_mse,h_fitted,g_fitted\n";
  for (Index k = 0; k < y.cols(); ++k) {
    int h = 0, g = 0;
    if (const auto* tb = std::get_if<TwoblockModel>(&model)) {
      h = tb->achieved_h();
      g = tb->achieved_g();
    } else if (const auto* pls = std::get_if<PlsModel>(&model)) {
      h = pls->n_components();
    } else {
      h = std::get<Pls1Set>(model).models.at(static_cast<std::size_t>(k)).n_components();
    }
    out += y.col_names[static_cast<std::size_t>(k)] + "," + format_double(r2(k)) + "," +
           format_double(mse(k)) + "," + std::to_string(h) + "," + std::to_string(g) + "\n";
  }
  return out;
}

int cmd_fit(const CommonArgs& c, const EstimatorArgs& e, std::ostream& out, std::ostream& err) {
  const Method method = parse_method(e.method);
  const Scaling scaling = parse_scaling(c.scaling);
  const DataMatrix x = read_csv(c.x);
  const DataMatrix y = read_csv(c.y);
  const fs::path dir = prepare_out_dir(c.out);

  AnyModel model;
  switch (method) {
    case Method::pls1: {
      std::vector<int> hs = e.h_list;
      if (hs.empty()) hs.assign(static_cast<std::size_t>(y.cols()), e.h);
      model = fit_pls1_set(x, y, hs, scaling);
      break;
    }
    case Method::pls2:
      model = fit_pls(x, y, e.h, scaling);
      break;
    case Method::xypls:
      model = fit_twoblock(x, y, {e.g, e.h, 0.0, 0.0}, scaling);
      break;
    case Method::sparse_twoblock:
      model = fit_twoblock(x, y, {e.g, e.h, e.kappa, e.eta}, scaling);
      break;
  }
  warn_if_truncated(model, err);
  save_model(model, dir / "model.json");
  write_text_file(dir / "fit_summary.csv", fit_summary_csv(model, x, y));
  if (const auto* tb = std::get_if<TwoblockModel>(&model)) {
    write_text_file(dir / "selection.csv", selection_csv(*tb));
    const SelectionReport rep = selection_report(*tb);
    out << "selected " << rep.selected_predictors.size() << "/" << x.cols() << " predictors, "
        << rep.selected_responses.size() << "/" << y.cols() << " responses\n";
  }
  out << "wrote " << (dir / "model.json").string() << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const CommonArgs& c, std::ostream& out) {
  const AnyModel model = load_model(model_path);
  const DataMatrix x = read_csv(c.x);
  const fs::path dir = prepare_out_dir(c.out);
  const DataMatrix pred = predict(model, x);
  write_text_file(dir / "predictions.csv", to_csv(pred));
  out << "wrote " << pred.rows() << " predictions to " << (dir / "predictions.csv").string() << "\n";
  return 0;
}

struct CvRun {
  AnyModel model;
  std::string parameters;
  std::string report_csv;
};

CvRun run_cv(Method method, const DataMatrix& x, const DataMatrix& y, const CvConfig& cfg,
             std::string_view label, bool header) {
  CvRun run;
  if (method == Method::pls1) {
    Pls1CvOutcome res = grid_search_pls1(x, y, cfg);
    for (std::size_t k = 0; k < res.per_response.size(); ++k) {
      run.report_csv += cv_report_csv(res.per_response[k], std::string(label) + ":" + y.col_names[k],
                                      header && k == 0);
    }
    run.parameters = describe_pls1(res.per_response);
    run.model = std::move(res.model);
  } else {
    CvOutcome res = grid_search(x, y, method, cfg);
    run.report_csv = cv_report_csv(res.report, label, header);
    run.parameters = describe(method, res.report.best);
    run.model = std::move(res.model);
  }
  return run;
}

int cmd_cv(const CommonArgs& c, const std::string& method_name, const GridArgs& g, std::ostream& out,
           std::ostream& err) {
  const Method method = parse_method(method_name);
  const CvConfig cfg = make_cv_config(g, c);
  const DataMatrix x = read_csv(c.x);
  const DataMatrix y = read_csv(c.y);
  cfg.validate(x.rows());
  const fs::path dir = prepare_out_dir(c.out);

  CvRun run = run_cv(method, x, y, cfg, to_string(method), true);
  warn_if_truncated(run.model, err);
  write_text_file(dir / "cv_report.csv", run.report_csv);
  save_model(run.model, dir / "model.json");
  out << std::left << std::setw(18) << "Method" << "Parameters\n"
      << std::setw(18) << to_string(method) << run.parameters << "\n";
  return 0;
}

int cmd_simulate(const CommonArgs& c, const SimulateArgs& s, std::ostream& out) {
  std::vector<SimScenario> scenarios;
  for (int p1 : s.p1_grid) {
    SimScenario sc;
    sc.n = s.n;
    sc.p1 = p1;
    sc.p2 = s.p2;
    sc.q1 = s.q1;
    sc.q2 = s.q2;
    sc.h_true = s.h_true;
    sc.noise_sd = s.noise_sd;
    sc.validate();
    scenarios.push_back(sc);
  }
  const Scaling scaling = parse_scaling(c.scaling);
  std::vector<EstimatorSpec> estimators;
  for (const auto& name : s.estimators) {
    const Method m = parse_method(name);
    EstimatorSpec spec{name, m, {s.g, s.h, s.kappa, s.eta}, scaling};
    if (m == Method::pls2) spec.hyper = {1, s.pls_h, 0.0, 0.0};
    if (m == Method::xypls) spec.hyper.eta = spec.hyper.kappa = 0.0;
    estimators.push_back(spec);
  }
  const fs::path dir = prepare_out_dir(c.out);
  const auto results = run_batch(scenarios, estimators, s.runs, c.seed);
  write_text_file(dir / "metrics.csv", batch_metrics_csv(results));
  for (const char* metric : {"mseb", "fpx", "fnx", "fpy", "fny"}) {
    write_text_file(dir / (std::string("plotdata_") + metric + ".csv"), plot_data_csv(results, metric));
  }
  out << std::left << std::setw(6) << "p1" << std::setw(18) << "estimator" << std::setw(14) << "MSEB"
      << std::setw(9) << "FPX" << std::setw(9) << "FNX" << std::setw(9) << "FPY" << "FNY\n";
  for (const auto& r : results) {
    out << std::setw(6) << r.scenario.p1 << std::setw(18) << r.estimator << std::setw(14)
        << std::setprecision(4) << std::scientific << r.mseb.mean << std::fixed << std::setprecision(2)
        << std::setw(9) << r.fpx.mean << std::setw(9) << r.fnx.mean << std::setw(9) << r.fpy.mean
        << r.fny.mean << std::defaultfloat << (r.failures ? "  (failed runs: " + std::to_string(r.failures) + ")" : "")
        << "\n";
  }
  return 0;
}

int cmd_compare(const CommonArgs& c, const CompareArgs& a, const GridArgs& g, std::ostream& out,
                std::ostream& err) {
  const CvConfig cfg = make_cv_config(g, c);
  const DataMatrix x = read_csv(c.x);
  const DataMatrix y = read_csv(c.y);
  const DataMatrix x_test = read_csv(a.x_test);
  const DataMatrix y_test = read_csv(a.y_test);
  cfg.validate(x.rows());
  if (y_test.col_names != y.col_names) {
    throw Error(ErrorCode::column_mismatch, "test responses must have the training response columns in order");
  }
  if (x_test.rows() != y_test.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "test X and Y row counts differ");
  }
  const fs::path dir = prepare_out_dir(c.out);

  std::string table = "method,parameters";
  for (const auto& name : y.col_names) table += "," + name + "_mse";
  table += ",average_mse";
  for (const auto& name : y.col_names) table += "," + name + "_r2";
  table += ",average_r2\n";
  std::string parity = "method,response,row,actual,predicted\n";
  std::string reports;

  out << std::left << std::setw(18) << "Method" << std::setw(34) << "Parameters";
  for (const auto& name : y.col_names) out << std::setw(14) << name.substr(0, 13);
  out << "Average\n";

  bool first = true;
  for (const auto& name : a.methods) {
    const Method method = parse_method(name);
    CvRun run = run_cv(method, x, y, cfg, name, first);
    first = false;
    warn_if_truncated(run.model, err);
    reports += run.report_csv;
    save_model(run.model, dir / ("model_" + name + ".json"));

    const MatrixXd pred = predict(run.model, x_test).values;
    const VectorXd mse = per_response_mse(y_test.values, pred);
    const VectorXd r2 = per_response_r2(y_test.values, pred);
    std::string params = run.parameters;
    std::replace(params.begin(), params.end(), ',', ';');
    table += name + "," + params;
    for (Index k = 0; k < mse.size(); ++k) table += "," + format_double(mse(k));
    table += "," + format_double(mse.mean());
    for (Index k = 0; k < r2.size(); ++k) table += "," + format_double(r2(k));
    table += "," + format_double(r2.mean()) + "\n";
    for (Index k = 0; k < y_test.cols(); ++k) {
      for (Index r = 0; r < y_test.rows(); ++r) {
        parity += name + "," + y.col_names[static_cast<std::size_t>(k)] + "," + std::to_string(r + 1) +
                  "," + format_double(y_test.values(r, k)) + "," + format_double(pred(r, k)) + "\n";
      }
    }

    out << std::setw(18) << name << std::setw(34) << run.parameters << std::fixed << std::setprecision(3);
    for (Index k = 0; k < mse.size(); ++k) out << std::setw(14) << mse(k);
    out << mse.mean() << "  (MSE)\n" << std::setw(52) << "";
    for (Index k = 0; k < r2.size(); ++k) out << std::setw(14) << r2(k);
    out << r2.mean() << "  (R2)\n" << std::defaultfloat;
  }
  write_text_file(dir / "compare_table.csv", table);
  write_text_file(dir / "parity.csv", parity);
  write_text_file(dir / "cv_report.csv", reports);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse twoblock PLS: fitting, prediction, cross-validation and simulation", "stpls"};
  app.set_config("--config", "", "TOML/INI file with option values (command-line flags win)");
  app.require_subcommand(1);
  // -h would collide with the --h component option on subcommands.
  app.set_help_flag("--help", "Print this help message and exit");

  CommonArgs fit_c, pred_c, cv_c, sim_c, cmp_c;
  EstimatorArgs est;
  GridArgs cv_grid, cmp_grid;
  SimulateArgs sim;
  CompareArgs cmp;
  std::string model_path;
  std::string cv_method;
  sim_c.scaling = "autoscale";

  auto* fit = app.add_subcommand("fit", "Fit one estimator and write model.json");
  add_common(fit, fit_c, true);
  fit->add_option("--method", est.method, "Estimator")->required()->check(CLI::IsMember(kMethods));
  fit->add_option("--g", est.g, "Response components")->capture_default_str();
  fit->add_option("--h", est.h, "Predictor components")->capture_default_str();
  fit->add_option("--eta", est.eta, "Predictor sparsity in [0,1)")->capture_default_str();
  fit->add_option("--kappa", est.kappa, "Response sparsity in [0,1)")->capture_default_str();
  fit->add_option("--h-list", est.h_list, "pls1: one h per response")->delimiter(',');

  auto* pred = app.add_subcommand("predict", "Apply a saved model to new predictors");
  add_common(pred, pred_c, false);
  pred->add_option("--model", model_path, "Model archive")->required()->check(CLI::ExistingFile);

  auto* cv = app.add_subcommand("cv", "K-fold grid search, refit at the best point");
  add_common(cv, cv_c, true);
  cv->add_option("--method", cv_method, "Estimator")->required()->check(CLI::IsMember(kMethods));
  add_grid(cv, cv_grid);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo comparison on simulated data");
  simulate->add_option("--out", sim_c.out, "Output directory")->capture_default_str();
  simulate->add_option("--seed", sim_c.seed, "Master seed")->capture_default_str();
  simulate->add_option("--scaling", sim_c.scaling, "Block preprocessing")
      ->check(CLI::IsMember({"center", "autoscale"}))
      ->capture_default_str();
  simulate->add_option("--n", sim.n, "Samples per dataset")->capture_default_str();
  simulate->add_option("--p1-grid", sim.p1_grid, "Informative predictor counts")->delimiter(',');
  simulate->add_option("--p2", sim.p2, "Uninformative predictors")->capture_default_str();
  simulate->add_option("--q1", sim.q1, "Informative responses")->capture_default_str();
  simulate->add_option("--q2", sim.q2, "Uninformative responses")->capture_default_str();
  simulate->add_option("--h-true", sim.h_true, "True latent dimension")->capture_default_str();
  simulate->add_option("--noise-sd", sim.noise_sd, "Noise standard deviation")->capture_default_str();
  simulate->add_option("--runs", sim.runs, "Runs per scenario")->capture_default_str();
  simulate->add_option("--estimators", sim.estimators, "pls2, xypls, sparse-twoblock")
      ->delimiter(',')
      ->check(CLI::IsMember({"pls2", "xypls", "sparse-twoblock"}));
  simulate->add_option("--g", sim.g, "Twoblock response components")->capture_default_str();
  simulate->add_option("--h", sim.h, "Twoblock predictor components")->capture_default_str();
  simulate->add_option("--eta", sim.eta, "Predictor sparsity")->capture_default_str();
  simulate->add_option("--kappa", sim.kappa, "Response sparsity")->capture_default_str();
  simulate->add_option("--pls-h", sim.pls_h, "PLS2 components")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Cross-validate all methods on train, score on test");
  add_common(compare, cmp_c, true);
  compare->add_option("--x-test", cmp.x_test, "Test predictors")->required()->check(CLI::ExistingFile);
  compare->add_option("--y-test", cmp.y_test, "Test responses")->required()->check(CLI::ExistingFile);
  compare->add_option("--methods", cmp.methods, "Methods to compare")
      ->delimiter(',')
      ->check(CLI::IsMember(kMethods));
  add_grid(compare, cmp_grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_c, est, out, err);
    if (pred->parsed()) return cmd_predict(model_path, pred_c, out);
    if (cv->parsed()) return cmd_cv(cv_c, cv_method, cv_grid, out, err);
    if (simulate->parsed()) return cmd_simulate(sim_c, sim, out);
    if (compare->parsed()) return cmd_compare(cmp_c, cmp, cmp_grid, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace stpls::cli
