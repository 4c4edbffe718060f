#include "stpls/simulation.hpp"

#include <cmath>
#include <random>

#include "stpls/csv.hpp"
#include "stpls/error.hpp"

namespace stpls {

using Eigen::Index;
using Eigen::MatrixXd;

void SimScenario::validate() const {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "n must be at least 2");
  if (p1 < 1 || q1 < 1 || h_true < 1) {
    throw Error(ErrorCode::invalid_argument, "p1, q1 and h_true must be positive");
  }
  if (p2 < 0 || q2 < 0) throw Error(ErrorCode::invalid_argument, "p2 and q2 must be non-negative");
  if (!(noise_sd > 0.0)) throw Error(ErrorCode::invalid_argument, "noise_sd must be positive");
  if (!(loading_range.lo <= loading_range.hi) || !(coef_range.lo <= coef_range.hi)) {
    throw Error(ErrorCode::invalid_argument, "interval bounds must be ordered");
  }
}

SimDataset generate_dataset(const SimScenario& s) {
  s.validate();
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> loading(s.loading_range.lo, s.loading_range.hi);
  std::uniform_real_distribution<double> coef(s.coef_range.lo, s.coef_range.hi);
  const Index p = s.p1 + s.p2;
  const Index q = s.q1 + s.q2;

  SimTruth truth;
  truth.scores.resize(s.n, s.h_true);
  for (Index c = 0; c < s.h_true; ++c) {
    for (Index r = 0; r < s.n; ++r) truth.scores(r, c) = normal(rng);
  }
  truth.loadings = MatrixXd::Zero(p, s.h_true);
  for (Index c = 0; c < s.h_true; ++c) {
    for (Index r = 0; r < s.p1; ++r) truth.loadings(r, c) = loading(rng);
  }
  MatrixXd x = truth.scores * truth.loadings.transpose();
  for (Index c = 0; c < p; ++c) {
    for (Index r = 0; r < s.n; ++r) x(r, c) += s.noise_sd * normal(rng);
  }
  truth.coefficients = MatrixXd::Zero(p, q);
  for (Index c = 0; c < s.q1; ++c) {
    for (Index r = 0; r < s.p1; ++r) truth.coefficients(r, c) = coef(rng);
  }
  MatrixXd y = x * truth.coefficients;
  for (Index c = 0; c < q; ++c) {
    for (Index r = 0; r < s.n; ++r) y(r, c) += s.noise_sd * normal(rng);
  }
  truth.informative_x.assign(static_cast<std::size_t>(p), false);
  std::fill_n(truth.informative_x.begin(), s.p1, true);
  truth.informative_y.assign(static_cast<std::size_t>(q), false);
  std::fill_n(truth.informative_y.begin(), s.q1, true);

  return {DataMatrix::with_default_names(std::move(x), "x"),
          DataMatrix::with_default_names(std::move(y), "y"), std::move(truth)};
}

namespace {

// (false positives %, false negatives %) of `selected` against `informative`.
std::pair<double, double> selection_rates(const std::vector<bool>& selected,
                                          const std::vector<bool>& informative) {
  std::size_t pos = 0, neg = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < informative.size(); ++i) {
    if (informative[i]) {
      ++pos;
      if (!selected[i]) ++fn;
    } else {
      ++neg;
      if (selected[i]) ++fp;
    }
  }
  const double fpr = neg ? 100.0 * static_cast<double>(fp) / static_cast<double>(neg) : 0.0;
  const double fnr = pos ? 100.0 * static_cast<double>(fn) / static_cast<double>(pos) : 0.0;
  return {fpr, fnr};
}

}  // namespace

SimResult compute_metrics(const MatrixXd& coefficients, const std::vector<bool>& selected_x,
                          const std::vector<bool>& selected_y, const SimTruth& truth) {
  const MatrixXd& b = truth.coefficients;
  if (coefficients.rows() != b.rows() || coefficients.cols() != b.cols() ||
      selected_x.size() != truth.informative_x.size() ||
      selected_y.size() != truth.informative_y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "fitted model is not conformable with the truth");
  }
  SimResult out;
  double ss = 0.0;
  std::size_t count = 0;
  for (Index c = 0; c < b.cols(); ++c) {
    if (!truth.informative_y[static_cast<std::size_t>(c)]) continue;
    for (Index r = 0; r < b.rows(); ++r) {
      const double d = coefficients(r, c) - b(r, c);
      ss += d * d;
      ++count;
    }
  }
  out.mseb = count ? ss / static_cast<double>(count) : 0.0;
  std::tie(out.fpx, out.fnx) = selection_rates(selected_x, truth.informative_x);
  std::tie(out.fpy, out.fny) = selection_rates(selected_y, truth.informative_y);
  return out;
}

SimResult compute_metrics(const TwoblockModel& model, const SimTruth& truth) {
  return compute_metrics(model.coefficients_original_scale(), nonzero_rows(model.W),
                         nonzero_rows(model.V), truth);
}

SimResult compute_metrics(const PlsModel& model, const SimTruth& truth) {
  const MatrixXd b = model.coefficients_original_scale();
  return compute_metrics(b, nonzero_rows(b), nonzero_rows(b.transpose()), truth);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

namespace {

struct RunOutcome {
  bool ok = false;
  SimResult metrics;
  std::string error;
};

RunOutcome run_one(const SimDataset& data, const EstimatorSpec& spec) {
  RunOutcome out;
  try {
    switch (spec.method) {
      case Method::pls1:
      case Method::pls2:
        out.metrics = compute_metrics(fit_pls(data.x, data.y, spec.hyper.h, spec.scaling), data.truth);
        break;
      case Method::xypls:
        out.metrics = compute_metrics(
            fit_twoblock(data.x, data.y, {spec.hyper.g, spec.hyper.h, 0.0, 0.0}, spec.scaling),
            data.truth);
        break;
      case Method::sparse_twoblock:
        out.metrics = compute_metrics(fit_twoblock(data.x, data.y, spec.hyper, spec.scaling), data.truth);
        break;
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return s;
}

}  // namespace

std::vector<BatchResult> run_batch(const std::vector<SimScenario>& scenarios,
                                   const std::vector<EstimatorSpec>& estimators, int runs,
                                   std::uint64_t seed) {
  if (runs < 1) throw Error(ErrorCode::invalid_argument, "runs must be at least 1");
  if (estimators.empty()) throw Error(ErrorCode::invalid_argument, "no estimators given");
  for (const auto& s : scenarios) s.validate();
  for (const auto& e : estimators) {
    e.hyper.validate();
    if (e.method == Method::pls1) {
      throw Error(ErrorCode::invalid_argument, "simulation supports pls2, xypls and sparse-twoblock");
    }
  }

  const std::size_t n_est = estimators.size();
  const auto n_runs = static_cast<std::size_t>(runs);
  std::vector<RunOutcome> outcomes(scenarios.size() * n_runs * n_est);
  const auto tasks = static_cast<std::int64_t>(scenarios.size() * n_runs);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t task = 0; task < tasks; ++task) {
    const auto t = static_cast<std::size_t>(task);
    const std::size_t s = t / n_runs;
    const std::size_t r = t % n_runs;
    SimScenario scenario = scenarios[s];
    scenario.seed = derive_seed(seed, s, r);
    const SimDataset data = generate_dataset(scenario);
    for (std::size_t e = 0; e < n_est; ++e) outcomes[t * n_est + e] = run_one(data, estimators[e]);
  }

  std::vector<BatchResult> results;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (std::size_t e = 0; e < n_est; ++e) {
      BatchResult br;
      br.scenario_index = s;
      br.scenario = scenarios[s];
      br.estimator = estimators[e].label;
      std::vector<double> mseb, fpx, fnx, fpy, fny;
      for (std::size_t r = 0; r < n_runs; ++r) {
        const RunOutcome& o = outcomes[(s * n_runs + r) * n_est + e];
        if (!o.ok) {
          if (br.failures++ == 0) br.first_error = o.error;
          continue;
        }
        mseb.push_back(o.metrics.mseb);
        fpx.push_back(o.metrics.fpx);
        fnx.push_back(o.metrics.fnx);
        fpy.push_back(o.metrics.fpy);
        fny.push_back(o.metrics.fny);
      }
      br.runs = static_cast<int>(mseb.size());
      br.mseb = summarize(mseb);
      br.fpx = summarize(fpx);
      br.fnx = summarize(fnx);
      br.fpy = summarize(fpy);
      br.fny = summarize(fny);
      results.push_back(std::move(br));
    }
  }
  return results;
}

std::string batch_metrics_csv(const std::vector<BatchResult>& results) {
  std::string out =
      "scenario,n,p1,p2,q1,q2,h_true,noise_sd,estimator,runs,failures,"
      "mseb_mean,mseb_se,fpx_mean,fpx_se,fnx_mean,fnx_se,fpy_mean,fpy_se,fny_mean,fny_se\n";
  for (const auto& r : results) {
    const auto& s = r.scenario;
    out += std::to_string(r.scenario_index + 1) + "," + std::to_string(s.n) + "," +
           std::to_string(s.p1) + "," + std::to_string(s.p2) + "," + std::to_string(s.q1) + "," +
           std::to_string(s.q2) + "," + std::to_string(s.h_true) + "," + format_double(s.noise_sd) +
           "," + r.estimator + "," + std::to_string(r.runs) + "," + std::to_string(r.failures);
    for (const MetricSummary* m : {&r.mseb, &r.fpx, &r.fnx, &r.fpy, &r.fny}) {
      out += "," + format_double(m->mean) + "," + format_double(m->se);
    }
    out += "\n";
  }
  return out;
}

std::string plot_data_csv(const std::vector<BatchResult>& results, std::string_view metric) {
  const MetricSummary BatchResult::*field = nullptr;
  if (metric == "mseb") field = &BatchResult::mseb;
  else if (metric == "fpx") field = &BatchResult::fpx;
  else if (metric == "fnx") field = &BatchResult::fnx;
  else if (metric == "fpy") field = &BatchResult::fpy;
  else if (metric == "fny") field = &BatchResult::fny;
  else throw Error(ErrorCode::invalid_argument, "unknown metric '" + std::string(metric) + "'");

  std::string out = "scenario,p1,estimator,mean,se\n";
  for (const auto& r : results) {
    const MetricSummary& m = r.*field;
    out += std::to_string(r.scenario_index + 1) + "," + std::to_string(r.scenario.p1) + "," +
           r.estimator + "," + format_double(m.mean) + "," + format_double(m.se) + "\n";
  }
  return out;
}

}  // namespace stpls
