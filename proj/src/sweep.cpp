#include "ects/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace ects {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs fn(0..n-1) on up to `jobs` threads. The first exception (tasks are
// expected to catch their own) is rethrown after all workers join.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

int strategy_index(const SweepResult& result, StrategyKind kind) {
  for (std::size_t s = 0; s < result.strategies.size(); ++s) {
    if (result.strategies[s] == kind) return static_cast<int>(s);
  }
  throw std::invalid_argument("strategy was not part of the sweep");
}

void fill_groups(const GammaModel& model, SeriesPath& path) {
  const int n = model.checkpoint_count();
  path.group.resize(n);
  for (int i = 0; i < n; ++i) {
    path.group[i] = model.partition.group_of(i, path.confidence[i]);
  }
}

}  // namespace

CostGrid CostGrid::full() {
  CostGrid g;
  g.alphas = {0.0001, 0.00025, 0.0005, 0.00075, 0.001, 0.0025, 0.005, 0.0075, 0.01,
              0.025,  0.05,    0.075,  0.1,     0.25,  0.5,    0.75,  1.0};
  g.betas = g.alphas;
  return g;
}

CostGrid CostGrid::quick() {
  CostGrid g;
  g.alphas = {0.0025, 0.025, 0.5};
  g.betas = {0.005, 0.05, 0.5};
  return g;
}

CostModel make_cost_model(double alpha, double beta) {
  CostModel cost;
  cost.delay_slope = alpha;
  cost.change_cost = beta;
  return cost;
}

FittedPipeline fit_pipeline(const Dataset& dataset, const SweepConfig& config) {
  if (config.max_groups < 1) throw std::invalid_argument("max_groups must be >= 1");

  const SplitPlan plan = make_splits(dataset, config.seed);
  auto chain = std::make_shared<const ClassifierChain>(
      fit_chain(gather(dataset, plan.classifier_split), dataset.checkpoints, config.classifier));

  const std::vector<TimeSeries> estimation = gather(dataset, plan.estimation_split);
  const std::vector<TimeSeries> validation = gather(dataset, plan.validation_split);

  // Group-count tuning: smallest K minimizing the cost-aware revocable
  // AvgCost on the validation split at the reference cell.
  const CostModel reference =
      make_cost_model(config.reference_alpha, config.reference_beta);
  std::vector<SeriesPath> val_paths;
  std::vector<Label> val_truths;
  val_paths.reserve(validation.size());
  for (const auto& s : validation) {
    val_paths.push_back(compute_path(*chain, s));
    val_truths.push_back(s.label);
  }
  const int k_cap = std::min<int>(config.max_groups, static_cast<int>(estimation.size()));
  int best_k = 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_cap; ++k) {
    const GammaModel candidate = fit_gamma(chain, estimation, k, config.smoothing);
    std::vector<RunTrace> traces;
    traces.reserve(val_paths.size());
    for (auto& p : val_paths) {
      fill_groups(candidate, p);
      traces.push_back(run_revocable(candidate, reference, p, true));
    }
    const double cost = avg_cost(traces, val_truths, reference, dataset.series_length);
    if (cost < best_cost) {
      best_cost = cost;
      best_k = k;
    }
  }
  return FittedPipeline{plan, fit_gamma(chain, estimation, best_k, config.smoothing)};
}

DatasetRun run_pipeline(const Dataset& dataset, const SweepConfig& config) {
  if (config.grid.alphas.empty() || config.grid.betas.empty()) {
    throw std::invalid_argument("the cost grid must not be empty");
  }
  if (config.strategies.empty()) throw std::invalid_argument("no strategies requested");

  DatasetRun run;
  run.dataset = dataset.name;
  run.series_length = dataset.series_length;

  const auto fit_start = std::chrono::steady_clock::now();
  FittedPipeline fitted = fit_pipeline(dataset, config);
  const GammaModel& model = fitted.model;
  run.chosen_groups = model.group_count;
  run.fit_seconds = seconds_since(fit_start);

  const auto replay_start = std::chrono::steady_clock::now();
  const std::vector<TimeSeries> test = gather(dataset, fitted.plan.test);
  run.n_test = static_cast<int>(test.size());
  std::vector<SeriesPath> paths;
  std::vector<Label> truths;
  paths.reserve(test.size());
  for (const auto& s : test) {
    paths.push_back(compute_path(model, s));
    truths.push_back(s.label);
  }

  const int n_alpha = static_cast<int>(config.grid.alphas.size());
  const int n_beta = static_cast<int>(config.grid.betas.size());
  const int n_strat = static_cast<int>(config.strategies.size());

  run.useful_revocation.resize(n_alpha);
  for (int a = 0; a < n_alpha; ++a) {
    run.useful_revocation[a] = useful_revocation_fraction(
        model, make_cost_model(config.grid.alphas[a], 0.0), paths, truths);
  }

  run.cells.assign(n_alpha, std::vector<std::vector<CellResult>>(
                                n_beta, std::vector<CellResult>(n_strat)));
  parallel_for(n_alpha * n_beta, config.jobs, [&](int idx) {
    const int a = idx / n_beta;
    const int b = idx % n_beta;
    const CostModel cost = make_cost_model(config.grid.alphas[a], config.grid.betas[b]);
    for (int s = 0; s < n_strat; ++s) {
      CellResult& cell = run.cells[a][b][s];
      try {
        cost.validate();
        std::vector<RunTrace> traces;
        traces.reserve(paths.size());
        for (std::size_t e = 0; e < paths.size(); ++e) {
          traces.push_back(run_strategy(model, cost, paths[e], config.strategies[s], truths[e]));
        }
        cell.summary = summarize(traces, truths, cost, dataset.series_length);
        cell.ok = true;
      } catch (const std::exception& ex) {
        cell.ok = false;
        cell.diagnostic = ex.what();
      }
    }
  });
  run.replay_seconds = seconds_since(replay_start);
  return run;
}

SweepResult run_sweep(const std::vector<Dataset>& datasets, const SweepConfig& config) {
  if (datasets.empty()) throw std::invalid_argument("no datasets to sweep");
  SweepResult result;
  result.grid = config.grid;
  result.strategies = config.strategies;
  result.runs.reserve(datasets.size());
  for (const auto& ds : datasets) result.runs.push_back(run_pipeline(ds, config));
  return result;
}

std::vector<std::vector<TestVerdict>> verdict_matrix(const SweepResult& result,
                                                     StrategyKind first, StrategyKind second,
                                                     double significance) {
  const int si = strategy_index(result, first);
  const int sj = strategy_index(result, second);
  const int n_alpha = static_cast<int>(result.grid.alphas.size());
  const int n_beta = static_cast<int>(result.grid.betas.size());
  std::vector<std::vector<TestVerdict>> matrix(n_alpha, std::vector<TestVerdict>(n_beta));
  for (int a = 0; a < n_alpha; ++a) {
    for (int b = 0; b < n_beta; ++b) {
      std::vector<double> xs, ys;
      for (const auto& run : result.runs) {
        const CellResult& ci = run.cells[a][b][si];
        const CellResult& cj = run.cells[a][b][sj];
        if (ci.ok && cj.ok) {
          xs.push_back(ci.summary.avg_cost);
          ys.push_back(cj.summary.avg_cost);
        }
      }
      if (xs.empty()) {
        matrix[a][b].diagnostic = "no comparable datasets";
      } else {
        matrix[a][b] = wilcoxon_signed_rank(xs, ys, significance);
      }
    }
  }
  return matrix;
}

FriedmanResult friedman_cell(const SweepResult& result, int alpha_idx, int beta_idx) {
  const int n_strat = static_cast<int>(result.strategies.size());
  std::vector<std::vector<double>> scores(n_strat);
  for (const auto& run : result.runs) {
    bool all_ok = true;
    for (int s = 0; s < n_strat; ++s) {
      if (!run.cells[alpha_idx][beta_idx][s].ok) all_ok = false;
    }
    if (!all_ok) continue;
    for (int s = 0; s < n_strat; ++s) {
      scores[s].push_back(run.cells[alpha_idx][beta_idx][s].summary.avg_cost);
    }
  }
  return friedman_ranks(scores);
}

std::vector<ParetoRow> pareto_rows(const SweepResult& result, double beta) {
  int beta_idx = -1;
  for (std::size_t b = 0; b < result.grid.betas.size(); ++b) {
    if (result.grid.betas[b] == beta) beta_idx = static_cast<int>(b);
  }
  if (beta_idx < 0) throw std::invalid_argument("beta is not a grid value");

  std::vector<int> alpha_order(result.grid.alphas.size());
  for (std::size_t i = 0; i < alpha_order.size(); ++i) alpha_order[i] = static_cast<int>(i);
  std::sort(alpha_order.begin(), alpha_order.end(), [&](int x, int y) {
    return result.grid.alphas[x] < result.grid.alphas[y];
  });

  std::vector<ParetoRow> rows;
  for (std::size_t s = 0; s < result.strategies.size(); ++s) {
    for (int a : alpha_order) {
      ParetoRow row;
      row.strategy = result.strategies[s];
      row.alpha = result.grid.alphas[a];
      double earliness_sum = 0.0, kappa_sum = 0.0;
      for (const auto& run : result.runs) {
        const CellResult& cell = run.cells[a][beta_idx][s];
        if (!cell.ok) continue;
        earliness_sum += cell.summary.earliness;
        kappa_sum += cell.summary.kappa;
        ++row.datasets;
      }
      if (row.datasets == 0) continue;
      row.earliness = earliness_sum / row.datasets;
      row.kappa = kappa_sum / row.datasets;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_summaries_csv(std::ostream& out, const SweepResult& result) {
  out << "dataset,alpha,beta,strategy,status,avg_cost,earliness,kappa,mean_revocations,"
         "diagnostic\n";
  for (const auto& run : result.runs) {
    for (std::size_t a = 0; a < result.grid.alphas.size(); ++a) {
      for (std::size_t b = 0; b < result.grid.betas.size(); ++b) {
        for (std::size_t s = 0; s < result.strategies.size(); ++s) {
          const CellResult& cell = run.cells[a][b][s];
          out << csv_escape(run.dataset) << ',' << format_double(result.grid.alphas[a]) << ','
              << format_double(result.grid.betas[b]) << ',' << strategy_name(result.strategies[s])
              << ',';
          if (cell.ok) {
            out << "ok," << format_double(cell.summary.avg_cost) << ','
                << format_double(cell.summary.earliness) << ','
                << format_double(cell.summary.kappa) << ','
                << format_double(cell.summary.mean_revocations) << ',';
          } else {
            out << "failed,,,,," << csv_escape(cell.diagnostic);
          }
          out << '\n';
        }
      }
    }
  }
}

void write_verdicts_csv(std::ostream& out, const SweepResult& result, StrategyKind first,
                        StrategyKind second, double significance) {
  const auto matrix = verdict_matrix(result, first, second, significance);
  out << "alpha,beta,first,second,n_effective,statistic,p_value,verdict\n";
  for (std::size_t a = 0; a < result.grid.alphas.size(); ++a) {
    for (std::size_t b = 0; b < result.grid.betas.size(); ++b) {
      const TestVerdict& v = matrix[a][b];
      out << format_double(result.grid.alphas[a]) << ',' << format_double(result.grid.betas[b])
          << ',' << strategy_name(first) << ',' << strategy_name(second) << ',';
      if (v.diagnostic == "no comparable datasets") {
        out << "0,,," << verdict_symbol(v.verdict) << '\n';
      } else {
        out << v.n_effective << ',' << format_double(v.statistic) << ','
            << format_double(v.p_value) << ',' << verdict_symbol(v.verdict) << '\n';
      }
    }
  }
}

void write_friedman_csv(std::ostream& out, const SweepResult& result) {
  out << "alpha,beta,strategy,mean_rank,chi_square\n";
  if (result.strategies.size() < 2) return;
  for (std::size_t a = 0; a < result.grid.alphas.size(); ++a) {
    for (std::size_t b = 0; b < result.grid.betas.size(); ++b) {
      FriedmanResult fr;
      try {
        fr = friedman_cell(result, static_cast<int>(a), static_cast<int>(b));
      } catch (const std::invalid_argument&) {
        continue;  // fewer than 2 complete datasets at this cell
      }
      for (std::size_t s = 0; s < result.strategies.size(); ++s) {
        out << format_double(result.grid.alphas[a]) << ',' << format_double(result.grid.betas[b])
            << ',' << strategy_name(result.strategies[s]) << ','
            << format_double(fr.mean_ranks[s]) << ',' << format_double(fr.chi_square) << '\n';
      }
    }
  }
}

void write_pareto_csv(std::ostream& out, const SweepResult& result, double beta) {
  out << "strategy,alpha,earliness,kappa,datasets\n";
  for (const ParetoRow& row : pareto_rows(result, beta)) {
    out << strategy_name(row.strategy) << ',' << format_double(row.alpha) << ','
        << format_double(row.earliness) << ',' << format_double(row.kappa) << ','
        << row.datasets << '\n';
  }
}

void write_useful_revocations_csv(std::ostream& out, const SweepResult& result) {
  out << "dataset,alpha,fraction\n";
  for (const auto& run : result.runs) {
    for (std::size_t a = 0; a < result.grid.alphas.size(); ++a) {
      out << csv_escape(run.dataset) << ',' << format_double(result.grid.alphas[a]) << ','
          << format_double(run.useful_revocation[a]) << '\n';
    }
  }
}

void export_sweep(const SweepResult& result, const SweepConfig& config, const std::string& dir,
                  double wall_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto open = [&](const std::string& name) {
    std::ofstream out(dir + "/" + name);
    if (!out) throw std::runtime_error("cannot write export file: " + dir + "/" + name);
    return out;
  };

  {
    auto out = open("summaries.csv");
    write_summaries_csv(out, result);
  }
  for (std::size_t i = 0; i < result.strategies.size(); ++i) {
    for (std::size_t j = i + 1; j < result.strategies.size(); ++j) {
      const std::string name = std::string("verdicts_") +
                               std::string(strategy_name(result.strategies[i])) + "_vs_" +
                               std::string(strategy_name(result.strategies[j])) + ".csv";
      auto out = open(name);
      write_verdicts_csv(out, result, result.strategies[i], result.strategies[j]);
    }
  }
  {
    auto out = open("friedman.csv");
    write_friedman_csv(out, result);
  }
  for (double beta : result.grid.betas) {
    auto out = open("pareto_beta_" + format_double(beta) + ".csv");
    write_pareto_csv(out, result, beta);
  }
  {
    auto out = open("useful_revocations.csv");
    write_useful_revocations_csv(out, result);
  }

  nlohmann::json manifest;
  manifest["format"] = "ects-sweep-manifest";
  manifest["version"] = 1;
  manifest["seed"] = config.seed;
  manifest["grid"] = {{"alphas", config.grid.alphas}, {"betas", config.grid.betas}};
  std::vector<std::string> names;
  for (StrategyKind s : config.strategies) names.emplace_back(strategy_name(s));
  manifest["strategies"] = names;
  manifest["config"] = {{"max_groups", config.max_groups},
                        {"smoothing", config.smoothing},
                        {"reference_alpha", config.reference_alpha},
                        {"reference_beta", config.reference_beta},
                        {"jobs", config.jobs},
                        {"classifier",
                         {{"learning_rate", config.classifier.learning_rate},
                          {"iterations", config.classifier.iterations},
                          {"l2_penalty", config.classifier.l2_penalty}}}};
  manifest["wall_seconds"] = wall_seconds;
  nlohmann::json datasets = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& run : result.runs) {
    datasets.push_back({{"name", run.dataset},
                        {"n_test", run.n_test},
                        {"series_length", run.series_length},
                        {"chosen_groups", run.chosen_groups},
                        {"fit_seconds", run.fit_seconds},
                        {"replay_seconds", run.replay_seconds}});
    for (std::size_t a = 0; a < result.grid.alphas.size(); ++a) {
      for (std::size_t b = 0; b < result.grid.betas.size(); ++b) {
        for (std::size_t s = 0; s < result.strategies.size(); ++s) {
          const CellResult& cell = run.cells[a][b][s];
          if (cell.ok) continue;
          failures.push_back({{"dataset", run.dataset},
                              {"alpha", result.grid.alphas[a]},
                              {"beta", result.grid.betas[b]},
                              {"strategy", strategy_name(result.strategies[s])},
                              {"diagnostic", cell.diagnostic}});
        }
      }
    }
  }
  manifest["datasets"] = datasets;
  manifest["failures"] = failures;
  auto out = open("manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace ects
