#include "ects/trigger.hpp"

#include <cassert>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ects {

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kIrrevocable: return "irrevocable";
    case StrategyKind::kRevCostUnaware: return "rev-cu";
    case StrategyKind::kRevCostAware: return "rev-ca";
    case StrategyKind::kOracle: return "oracle";
  }
  return "unknown";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
  if (name == "irrevocable") return StrategyKind::kIrrevocable;
  if (name == "rev-cu") return StrategyKind::kRevCostUnaware;
  if (name == "rev-ca") return StrategyKind::kRevCostAware;
  if (name == "oracle") return StrategyKind::kOracle;
  return std::nullopt;
}

SeriesPath compute_path(const ClassifierChain& chain, const TimeSeries& series) {
  if (series.length() != chain.series_length) {
    throw std::invalid_argument("series length does not match the chain");
  }
  SeriesPath path;
  const int n = chain.checkpoint_count();
  path.confidence.resize(n);
  path.predicted.resize(n);
  for (int i = 0; i < n; ++i) {
    path.confidence[i] = predict_confidence(chain, Prefix{&series, chain.checkpoints[i]});
    path.predicted[i] = predicted_label(path.confidence[i]);
  }
  return path;
}

SeriesPath compute_path(const GammaModel& model, const TimeSeries& series) {
  SeriesPath path = compute_path(*model.chain, series);
  const int n = model.checkpoint_count();
  path.group.resize(n);
  for (int i = 0; i < n; ++i) {
    path.group[i] = model.partition.group_of(i, path.confidence[i]);
  }
  return path;
}

namespace {

void check_path(const GammaModel& model, const SeriesPath& path) {
  if (static_cast<int>(path.confidence.size()) != model.checkpoint_count() ||
      path.group.size() != path.confidence.size() ||
      path.predicted.size() != path.confidence.size()) {
    throw std::invalid_argument("series path does not match the model's checkpoint grid");
  }
}

TraceRow base_row(const GammaModel& model, const SeriesPath& path, int i) {
  TraceRow row;
  row.time = model.checkpoints()[i];
  row.confidence = path.confidence[i];
  row.predicted = path.predicted[i];
  row.group = path.group[i];
  return row;
}

// Phase shared by every non-oracle strategy: walk checkpoints until acting
// now minimizes the expected cost curve. The final checkpoint's curve has a
// single entry, so the walk always decides.
int first_decision(const GammaModel& model, const CostModel& cost, const SeriesPath& path,
                   RunTrace& trace) {
  const int n = model.checkpoint_count();
  for (int i = 0; i < n; ++i) {
    const ExpectedCostCurve curve =
        expected_cost_curve_at(model, i, path.group[i], path.predicted[i], cost);
    TraceRow row = base_row(model, path, i);
    row.tau_star = curve.argmin;
    row.f_now = curve.values[0];
    row.f_best = curve.min();
    if (curve.argmin == 0) {
      row.decided = true;
      trace.sequence.append(model.checkpoints()[i], path.predicted[i]);
      trace.rows.push_back(row);
      return i;
    }
    trace.rows.push_back(row);
  }
  assert(false && "the final checkpoint's curve always has argmin 0");
  return n - 1;
}

}  // namespace

RunTrace run_irrevocable(const GammaModel& model, const CostModel& cost,
                         const SeriesPath& path) {
  check_path(model, path);
  cost.validate();
  RunTrace trace;
  first_decision(model, cost, path, trace);
  return trace;
}

RunTrace run_revocable(const GammaModel& model, const CostModel& cost, const SeriesPath& path,
                       bool cost_aware) {
  check_path(model, path);
  cost.validate();
  // The revision criterion runs under `criterion_cost`; the cost-unaware
  // variant zeroes the change fee there, and only there.
  CostModel criterion_cost = cost;
  if (!cost_aware) criterion_cost.change_cost = 0.0;

  RunTrace trace;
  const int first = first_decision(model, criterion_cost, path, trace);
  const int n = model.checkpoint_count();
  const int series_length = model.series_length();
  int prev_idx = first;

  for (int i = first + 1; i < n; ++i) {
    const Label last = trace.sequence.back().label;
    const Label candidate = path.predicted[i];
    const int group = path.group[i];
    const double paid = criterion_cost.change_cost * trace.sequence.change_count();

    const ExpectedCostCurve curve =
        revocable_cost_curve_at(model, i, group, candidate, last, paid, criterion_cost);
    const double cost_new =
        expected_misclass_current(model, i, group, candidate, criterion_cost) + paid +
        criterion_cost.change(candidate, last) +
        delay_cost(criterion_cost, model.checkpoints()[i], series_length);
    const double cost_prev =
        expected_misclass_current(model, i, group, last, criterion_cost) + paid +
        delay_cost(criterion_cost, model.checkpoints()[prev_idx], series_length);

    TraceRow row = base_row(model, path, i);
    row.tau_star = curve.argmin;
    row.f_now = curve.values[0];
    row.f_best = curve.min();
    row.cost_new = cost_new;
    row.cost_prev = cost_prev;
    row.clause_differs = candidate != last;
    row.clause_now = curve.argmin == 0;
    row.clause_cheaper = cost_new < cost_prev;
    if (row.clause_differs && row.clause_now && row.clause_cheaper) {
      const bool appended = trace.sequence.append(model.checkpoints()[i], candidate);
      assert(appended && "clause_differs guarantees the append is recorded");
      (void)appended;
      prev_idx = i;
      row.decided = true;
    }
    trace.rows.push_back(row);
  }
  return trace;
}

RunTrace run_oracle(const ClassifierChain& chain, const CostModel& cost, const SeriesPath& path,
                    Label truth) {
  if (truth != 0 && truth != 1) {
    throw std::invalid_argument("the hindsight oracle requires a ground-truth label");
  }
  if (static_cast<int>(path.predicted.size()) != chain.checkpoint_count()) {
    throw std::invalid_argument("series path does not match the chain's checkpoint grid");
  }
  cost.validate();
  const int n = chain.checkpoint_count();
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double c = cost.misclass(path.predicted[i], truth) +
                     delay_cost(cost, chain.checkpoints[i], chain.series_length);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  RunTrace trace;
  for (int i = 0; i <= best; ++i) {
    TraceRow row;
    row.time = chain.checkpoints[i];
    row.confidence = path.confidence.empty() ? 0.0 : path.confidence[i];
    row.predicted = path.predicted[i];
    row.group = path.group.empty() ? 0 : path.group[i];
    row.decided = i == best;
    trace.rows.push_back(row);
  }
  trace.sequence.append(chain.checkpoints[best], path.predicted[best]);
  return trace;
}

RunTrace run_irrevocable(const GammaModel& model, const CostModel& cost,
                         const TimeSeries& series) {
  return run_irrevocable(model, cost, compute_path(model, series));
}

RunTrace run_revocable(const GammaModel& model, const CostModel& cost, const TimeSeries& series,
                       bool cost_aware) {
  return run_revocable(model, cost, compute_path(model, series), cost_aware);
}

RunTrace run_oracle(const ClassifierChain& chain, const CostModel& cost,
                    const TimeSeries& series, Label truth) {
  return run_oracle(chain, cost, compute_path(chain, series), truth);
}

RunTrace run_strategy(const GammaModel& model, const CostModel& cost, const SeriesPath& path,
                      StrategyKind kind, Label truth) {
  switch (kind) {
    case StrategyKind::kIrrevocable: return run_irrevocable(model, cost, path);
    case StrategyKind::kRevCostUnaware: return run_revocable(model, cost, path, false);
    case StrategyKind::kRevCostAware: return run_revocable(model, cost, path, true);
    case StrategyKind::kOracle: return run_oracle(*model.chain, cost, path, truth);
  }
  throw std::invalid_argument("unknown strategy");
}

double useful_revocation_fraction(const GammaModel& model, const CostModel& cost,
                                  const std::vector<SeriesPath>& paths,
                                  const std::vector<Label>& truths) {
  if (paths.empty() || paths.size() != truths.size()) {
    throw std::invalid_argument("paths and truths must be non-empty and aligned");
  }
  int useful = 0;
  for (std::size_t e = 0; e < paths.size(); ++e) {
    const RunTrace irr = run_irrevocable(model, cost, paths[e]);
    const RunTrace oracle = run_oracle(*model.chain, cost, paths[e], truths[e]);
    if (irr.sequence.back().label != oracle.sequence.back().label) ++useful;
  }
  return static_cast<double>(useful) / static_cast<double>(paths.size());
}

double useful_revocation_fraction(const GammaModel& model, const CostModel& cost,
                                  const std::vector<TimeSeries>& series) {
  std::vector<SeriesPath> paths;
  std::vector<Label> truths;
  paths.reserve(series.size());
  truths.reserve(series.size());
  for (const auto& s : series) {
    if (!s.labeled()) {
      throw std::invalid_argument("useful-revocation accounting requires labeled series");
    }
    paths.push_back(compute_path(model, s));
    truths.push_back(s.label);
  }
  return useful_revocation_fraction(model, cost, paths, truths);
}

void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  out << "series,time,confidence,group,predicted,tau_star,f_now,f_best,"
         "cost_new,cost_prev,clause_differs,clause_now,clause_cheaper,decided\n";
  const auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (std::size_t e = 0; e < traces.size(); ++e) {
    for (const TraceRow& r : traces[e].rows) {
      out << e << ',' << r.time << ',' << format_double(r.confidence) << ',' << r.group << ','
          << r.predicted << ',' << r.tau_star << ',' << format_double(r.f_now) << ','
          << format_double(r.f_best) << ',' << cell(r.cost_new) << ',' << cell(r.cost_prev)
          << ',' << r.clause_differs << ',' << r.clause_now << ',' << r.clause_cheaper << ','
          << r.decided << '\n';
    }
  }
}

}  // namespace ects
