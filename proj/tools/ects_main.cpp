// Command-line front end: generate corpora, train models, replay strategies,
// sweep cost grids, and report revocation opportunity statistics.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ects/data.hpp"
#include "ects/metrics.hpp"
#include "ects/model_io.hpp"
#include "ects/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Relative paths that do not exist are retried under $ECTS_DATA_DIR.
std::string resolve_data_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (!fs::path(path).is_absolute()) {
    const char* dir = std::getenv("ECTS_DATA_DIR");
    if (dir != nullptr && *dir != '\0') {
      const fs::path alt = fs::path(dir) / path;
      if (fs::exists(alt)) return alt.string();
    }
  }
  return path;
}

std::string timestamped_dir(const std::string& command) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return "runs/" + command + "-" + buf;
}

std::vector<ects::StrategyKind> parse_strategies(const std::vector<std::string>& names) {
  std::vector<ects::StrategyKind> kinds;
  for (const auto& n : names) {
    const auto kind = ects::strategy_from_name(n);
    if (!kind) {
      throw CLI::ValidationError("--strategy", "unknown strategy '" + n +
                                                   "' (expected irrevocable, rev-cu, rev-ca, or "
                                                   "oracle)");
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct TuningOptions {
  std::uint64_t seed = 1;
  int max_groups = 5;
  double smoothing = 1.0;
  ects::ClassifierConfig classifier;
  double reference_alpha = 0.01;
  double reference_beta = 0.05;
};

void add_tuning_options(CLI::App* cmd, TuningOptions* opts) {
  cmd->add_option("--seed", opts->seed, "Split/sampling seed")->capture_default_str();
  cmd->add_option("--max-groups", opts->max_groups,
                  "Largest confidence-group count tried during tuning")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--smoothing", opts->smoothing, "Additive smoothing of the frequency tables")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--learning-rate", opts->classifier.learning_rate,
                  "Classifier gradient-descent step size")
      ->capture_default_str();
  cmd->add_option("--iterations", opts->classifier.iterations,
                  "Classifier gradient-descent iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--l2", opts->classifier.l2_penalty, "Classifier L2 penalty")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--reference-alpha", opts->reference_alpha,
                  "Delay slope of the group-count tuning cell")
      ->capture_default_str();
  cmd->add_option("--reference-beta", opts->reference_beta,
                  "Change cost of the group-count tuning cell")
      ->capture_default_str();
}

ects::SweepConfig to_sweep_config(const TuningOptions& opts) {
  ects::SweepConfig config;
  config.seed = opts.seed;
  config.max_groups = opts.max_groups;
  config.smoothing = opts.smoothing;
  config.classifier = opts.classifier;
  config.reference_alpha = opts.reference_alpha;
  config.reference_beta = opts.reference_beta;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Early and revocable classification of time series as cost minimization"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value config file; flags win");

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a synthetic labeled corpus");
  ects::SyntheticSpec spec;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output dataset path (.tsv)")->required();
  gen->add_option("--name", spec.name, "Dataset name")->capture_default_str();
  gen->add_option("--n", spec.n_series, "Number of series")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--length", spec.series_length, "Series length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--gap", spec.gap, "Class mean separation at full strength")
      ->capture_default_str();
  gen->add_option("--onset", spec.onset_frac, "Fraction of length before any signal")
      ->capture_default_str();
  gen->add_option("--rise", spec.rise_frac, "Fraction of length over which the signal ramps up")
      ->capture_default_str();
  gen->add_option("--flip", spec.flip_frac,
                  "Fraction of length at which inverted series recover (< 0 disables)")
      ->capture_default_str();
  gen->add_option("--flip-prob", spec.flip_prob,
                  "Probability a series starts polarity-inverted")
      ->capture_default_str();
  gen->add_option("--noise", spec.noise, "AR(1) innovation scale")->capture_default_str();
  gen->add_option("--ar", spec.ar_coeff, "AR(1) coefficient")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();

  // ---- train --------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Fit a model on a labeled corpus");
  std::string train_data, train_model, train_splits;
  TuningOptions train_opts;
  train->add_option("--data", train_data, "Labeled dataset path")->required();
  train->add_option("--model", train_model, "Output model path")->required();
  train->add_option("--splits", train_splits, "Also dump the split plan to this JSON file");
  add_tuning_options(train, &train_opts);

  // ---- run ----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Replay strategies on a corpus with a trained model");
  std::string run_model, run_data, run_out;
  double run_alpha = 0.01, run_beta = 0.05;
  std::vector<std::string> run_strategies{"rev-ca"};
  bool run_unlabeled = false;
  run->add_option("--model", run_model, "Trained model path")->required();
  run->add_option("--data", run_data, "Dataset to replay")->required();
  run->add_option("--alpha", run_alpha, "Delay slope")->capture_default_str();
  run->add_option("--beta", run_beta, "Change cost")->capture_default_str();
  run->add_option("--strategy", run_strategies,
                  "Strategies to replay (irrevocable, rev-cu, rev-ca, oracle); repeatable")
      ->capture_default_str();
  run->add_flag("--unlabeled", run_unlabeled, "Treat the dataset as unlabeled measurements only");
  run->add_option("--out", run_out, "Output directory (default: runs/run-<timestamp>)");

  // ---- sweep --------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Replay strategies over a cost grid");
  std::vector<std::string> sweep_data;
  std::vector<double> sweep_alphas, sweep_betas;
  std::vector<std::string> sweep_strategies{"irrevocable", "rev-cu", "rev-ca"};
  TuningOptions sweep_opts;
  std::string sweep_out;
  bool sweep_quick = false, sweep_strict = false;
  int sweep_jobs = 1;
  sweep->add_option("--data", sweep_data, "Dataset paths; repeatable")->required();
  sweep->add_flag("--quick", sweep_quick, "Use the 3x3 smoke grid instead of the full 17x17");
  sweep->add_option("--alphas", sweep_alphas, "Custom delay slopes (comma separated)")
      ->delimiter(',');
  sweep->add_option("--betas", sweep_betas, "Custom change costs (comma separated)")
      ->delimiter(',');
  sweep->add_option("--strategies", sweep_strategies, "Strategies to sweep")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--jobs", sweep_jobs, "Worker threads replaying grid cells")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output directory (default: runs/sweep-<timestamp>)");
  sweep->add_flag("--strict", sweep_strict, "Exit non-zero when any grid cell fails");
  add_tuning_options(sweep, &sweep_opts);

  // ---- stats --------------------------------------------------------------
  auto* stats = app.add_subcommand(
      "stats", "Report the fraction of test series with repairable first decisions");
  std::string stats_data, stats_out;
  std::vector<double> stats_alphas{0.0025, 0.025, 0.5};
  TuningOptions stats_opts;
  stats->add_option("--data", stats_data, "Labeled dataset path")->required();
  stats->add_option("--alphas", stats_alphas, "Delay slopes to report (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  stats->add_option("--out", stats_out, "Optional CSV output path");
  add_tuning_options(stats, &stats_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ects::Dataset ds = ects::generate_synthetic(spec, gen_seed);
      if (const fs::path parent = fs::path(gen_out).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
      }
      ects::save_dataset(ds, gen_out);
      ects::write_dataset_metadata(ds, gen_out + ".meta.json", &spec);
      std::cout << "wrote " << ds.size() << " series of length " << ds.series_length << " to "
                << gen_out << "\n";
      return 0;
    }

    if (train->parsed()) {
      const ects::Dataset ds = ects::load_dataset(resolve_data_path(train_data));
      const auto start = std::chrono::steady_clock::now();
      const ects::FittedPipeline fitted = ects::fit_pipeline(ds, to_sweep_config(train_opts));
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (const fs::path parent = fs::path(train_model).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
      }
      ects::save_model(fitted.model, train_model);
      if (!train_splits.empty()) ects::save_splits(fitted.plan, train_splits);
      std::cout << "trained on " << ds.name << ": " << fitted.model.checkpoint_count()
                << " checkpoints, " << fitted.model.group_count << " confidence groups ("
                << ects::format_double(secs) << "s); model written to " << train_model << "\n";
      return 0;
    }

    if (run->parsed()) {
      const ects::GammaModel model = ects::load_model(run_model);
      const ects::Dataset ds = ects::load_dataset(resolve_data_path(run_data), !run_unlabeled);
      if (ds.series_length != model.series_length()) {
        throw std::runtime_error("dataset length " + std::to_string(ds.series_length) +
                                 " does not match the model's " +
                                 std::to_string(model.series_length()));
      }
      const std::vector<ects::StrategyKind> kinds = parse_strategies(run_strategies);
      const ects::CostModel cost = ects::make_cost_model(run_alpha, run_beta);
      cost.validate();

      const std::string out_dir = run_out.empty() ? timestamped_dir("run") : run_out;
      fs::create_directories(out_dir);

      std::vector<ects::SeriesPath> paths;
      std::vector<ects::Label> truths;
      paths.reserve(ds.series.size());
      for (const auto& s : ds.series) {
        paths.push_back(ects::compute_path(model, s));
        truths.push_back(s.label);
      }

      json manifest;
      manifest["command"] = "run";
      manifest["model"] = run_model;
      manifest["data"] = run_data;
      manifest["n_series"] = ds.size();
      manifest["alpha"] = run_alpha;
      manifest["beta"] = run_beta;
      manifest["labeled"] = !run_unlabeled;
      json summaries = json::array();

      std::ofstream summary_csv;
      if (!run_unlabeled) {
        summary_csv.open(out_dir + "/summary.csv");
        summary_csv << "strategy,avg_cost,earliness,kappa,mean_revocations\n";
      }
      for (const ects::StrategyKind kind : kinds) {
        if (kind == ects::StrategyKind::kOracle && run_unlabeled) {
          throw std::runtime_error("the oracle strategy needs ground-truth labels");
        }
        std::vector<ects::RunTrace> traces;
        traces.reserve(paths.size());
        for (std::size_t e = 0; e < paths.size(); ++e) {
          traces.push_back(ects::run_strategy(model, cost, paths[e], kind, truths[e]));
        }
        const std::string name(ects::strategy_name(kind));
        {
          std::ofstream trace_out(out_dir + "/traces_" + name + ".csv");
          if (!trace_out) throw std::runtime_error("cannot write traces CSV");
          ects::write_trace_csv(trace_out, traces);
        }
        if (!run_unlabeled) {
          const ects::EvalSummary s =
              ects::summarize(traces, truths, cost, ds.series_length);
          summary_csv << name << ',' << ects::format_double(s.avg_cost) << ','
                      << ects::format_double(s.earliness) << ',' << ects::format_double(s.kappa)
                      << ',' << ects::format_double(s.mean_revocations) << '\n';
          summaries.push_back({{"strategy", name},
                               {"avg_cost", s.avg_cost},
                               {"earliness", s.earliness},
                               {"kappa", s.kappa},
                               {"mean_revocations", s.mean_revocations}});
          std::cout << name << ": avg_cost " << ects::format_double(s.avg_cost) << ", earliness "
                    << ects::format_double(s.earliness) << ", kappa "
                    << ects::format_double(s.kappa) << "\n";
        }
      }
      manifest["summaries"] = summaries;
      write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
      std::cout << "outputs in " << out_dir << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      ects::SweepConfig config = to_sweep_config(sweep_opts);
      config.jobs = sweep_jobs;
      config.strategies = parse_strategies(sweep_strategies);
      if (sweep_quick) config.grid = ects::CostGrid::quick();
      if (!sweep_alphas.empty()) config.grid.alphas = sweep_alphas;
      if (!sweep_betas.empty()) config.grid.betas = sweep_betas;

      std::vector<ects::Dataset> datasets;
      datasets.reserve(sweep_data.size());
      for (const auto& p : sweep_data) {
        datasets.push_back(ects::load_dataset(resolve_data_path(p)));
      }

      const std::string out_dir = sweep_out.empty() ? timestamped_dir("sweep") : sweep_out;
      const auto start = std::chrono::steady_clock::now();
      const ects::SweepResult result = ects::run_sweep(datasets, config);
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      ects::export_sweep(result, config, out_dir, wall);
      write_text_file(out_dir + "/config.txt", app.config_to_str(true, false));

      int failures = 0;
      for (const auto& ds_run : result.runs) {
        for (const auto& row : ds_run.cells) {
          for (const auto& cell_row : row) {
            for (const auto& cell : cell_row) {
              if (!cell.ok) ++failures;
            }
          }
        }
        std::cout << ds_run.dataset << ": " << ds_run.chosen_groups << " groups, fit "
                  << ects::format_double(ds_run.fit_seconds) << "s, replay "
                  << ects::format_double(ds_run.replay_seconds) << "s\n";
      }
      std::cout << "sweep of " << result.runs.size() << " dataset(s) over "
                << config.grid.alphas.size() << "x" << config.grid.betas.size() << " cells in "
                << ects::format_double(wall) << "s; exports in " << out_dir << "\n";
      if (failures > 0) {
        std::cout << failures << " cell(s) failed; see manifest.json\n";
        if (sweep_strict) return 3;
      }
      return 0;
    }

    if (stats->parsed()) {
      const ects::Dataset ds = ects::load_dataset(resolve_data_path(stats_data));
      const ects::FittedPipeline fitted = ects::fit_pipeline(ds, to_sweep_config(stats_opts));
      const std::vector<ects::TimeSeries> test = ects::gather(ds, fitted.plan.test);
      std::string csv = "dataset,alpha,fraction\n";
      for (double alpha : stats_alphas) {
        const double fraction = ects::useful_revocation_fraction(
            fitted.model, ects::make_cost_model(alpha, 0.0), test);
        csv += ds.name + "," + ects::format_double(alpha) + "," +
               ects::format_double(fraction) + "\n";
        std::cout << "alpha " << ects::format_double(alpha) << ": repairable fraction "
                  << ects::format_double(fraction) << "\n";
      }
      if (!stats_out.empty()) write_text_file(stats_out, csv);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
