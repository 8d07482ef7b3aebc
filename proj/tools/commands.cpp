#include "commands.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "config.hpp"
#include "output.hpp"
#include "qboost/bench.hpp"
#include "qboost/classifier.hpp"
#include "qboost/metrics.hpp"
#include "qboost/random.hpp"
#include "solve.hpp"

namespace qboost::cli {

namespace {

Json load_config(const std::filesystem::path& path) {
  if (path.empty()) return Json::object();
  const auto j = read_json_file(path);
  if (!j.is_object()) throw std::invalid_argument(path.string() + ": configuration must be a JSON object");
  return j;
}

// Applies --seed and --solver to the raw configuration so the manifest
// records what actually ran.
Json apply_overrides(Json j, const CommonOptions& o, bool nested_solver) {
  if (o.seed) j["seed"] = *o.seed;
  if (o.solver) {
    if (nested_solver) {
      if (!j.contains("solver")) j["solver"] = Json::object();
      j["solver"]["name"] = *o.solver;
    }
  }
  return j;
}

std::optional<double> at_recall(std::span<const double> m, std::span<const int> labels, const MetricsSettings& s) {
  try {
    return precision_at_recall(pr_curve(m, labels, s.n_thresholds), s.recall_target);
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json pr_json(const ConfusionCounts& c) {
  const auto pr = precision_recall(c);
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"tn", c.tn},
          {"fn", c.fn},
          {"precision", optional_json(pr.precision)},
          {"recall", optional_json(pr.recall)}};
}

std::pair<Dataset, Dataset> load_data(const DataSettings& d) {
  if (d.synthetic) return generate_synthetic(*d.synthetic);
  return {load_csv(d.train_csv, d.label_column, d.date_column), load_csv(d.test_csv, d.label_column, d.date_column)};
}

// The relative gap is undefined against a zero reference cost (for example
// when the empty selection is optimal); it is then reported as null.
std::optional<double> gap_reference(double reference_cost) {
  if (reference_cost == 0.0) return std::nullopt;
  return reference_cost;
}

Json trace_summary(const SolveOutcome& s, double reference_cost) {
  std::size_t scored = 0;
  for (const auto& r : s.trace.records()) scored += r.cost.has_value();
  const auto ref = gap_reference(reference_cost);
  const auto c2g = ref ? cycles_to_gap(s.trace, *ref) : std::nullopt;
  return {{"solver", s.trace.solver()},
          {"best_bitstring", s.best.to_string()},
          {"best_cost", s.cost},
          {"reference_cost", reference_cost},
          {"gap", ref ? Json(gap_from_costs(s.cost, *ref)) : Json(nullptr)},
          {"cycles_used", s.trace.size()},
          {"scored_cycles", scored},
          {"cycles_to_1pct_gap", c2g ? Json(*c2g) : Json(nullptr)},
          {"details", s.details}};
}

}  // namespace

void cmd_gen_data(const CommonOptions& o) {
  Json j = load_config(o.config);
  if (o.seed) j["seed"] = *o.seed;
  const auto spec = j.get<SyntheticSpec>();
  Json effective;
  to_json(effective, spec);
  RunOutput out(o.out, "gen-data", effective, spec.seed);
  out.stage("generate", [&] {
    const auto [train, test] = generate_synthetic(spec);
    save_csv(out.path("train.csv"), train);
    save_csv(out.path("test.csv"), test);
    out.record("train.csv");
    out.record("test.csv");
    out.json("data_summary.json", {{"n_train", train.size()},
                                   {"n_test", test.size()},
                                   {"n_features", train.n_features()},
                                   {"train_positive_fraction", train.positive_fraction()},
                                   {"test_positive_fraction", test.positive_fraction()}});
  });
  out.finish();
}

void cmd_train(const CommonOptions& o) {
  const Json raw = apply_overrides(load_config(o.config), o, true);
  const auto cfg = raw.get<TrainConfig>();
  RunOutput out(o.out, "train", raw, cfg.seed);

  Dataset train, test;
  out.stage("data", [&] {
    std::tie(train, test) = load_data(cfg.data);
    if (cfg.data.rebalance != "none") {
      const auto mode = cfg.data.rebalance == "undersample" ? RebalanceMode::undersample : RebalanceMode::oversample;
      train = rebalance(train, mode, derive_seed(cfg.seed, "rebalance"));
    }
    spdlog::info("train {} rows ({:.3f} positive), test {} rows", train.size(), train.positive_fraction(),
                 test.size());
  });

  auto ens_cfg = cfg.ensemble;
  ens_cfg.seed = derive_seed(cfg.seed, "ensemble");
  const auto& solver = cfg.solver;
  auto weight_solver = [&](const QuboMatrix& q) {
    return run_solver(q, solver.name, solver, derive_seed(cfg.seed, "tune.solver")).best;
  };

  double lambda10 = cfg.lambda.value_or(0.0);
  Json tuning = nullptr;
  if (!cfg.lambda_grid.empty()) {
    out.stage("tune_lambda", [&] {
      const auto t = tune_lambda_scores(ens_cfg, train, cfg.lambda_grid, derive_seed(cfg.seed, "tune"), weight_solver,
                                        cfg.metrics.recall_target, cfg.metrics.n_thresholds, true);
      lambda10 = t.best;
      tuning = Json::array();
      for (const auto& s : t.scores) tuning.push_back({{"lambda", s.lambda}, {"precision", optional_json(s.precision)}});
    });
  }
  // Grid values refer to N = 10 learners and are rescaled to the ensemble size.
  const double lambda_per_sample = cfg.lambda_grid.empty() ? lambda10 : scale_lambda(lambda10, ens_cfg.n_learners);

  Ensemble ens;
  out.stage("ensemble", [&] { ens = train_ensemble(ens_cfg, train); });

  QuboMatrix q;
  out.stage("qubo", [&] {
    q = build_qubo(ens.predictions, train.labels(), lambda_per_sample * static_cast<double>(train.size()));
    out.json("qubo.json", q);
  });

  SolveOutcome solved;
  double reference_cost = 0.0;
  out.stage("solve", [&] {
    solved = run_solver(q, solver.name, solver, derive_seed(cfg.seed, "solver"));
    reference_cost = solver.name == "brute_force" ? solved.cost
                                                  : reference_solution(q, derive_seed(cfg.seed, "reference")).second;
    out.csv("trace.csv", solved.trace.to_csv(gap_reference(reference_cost)));
  });

  StrongClassifier clf;
  out.stage("classifier", [&] {
    clf = make_classifier(ens.learners, solved.best, train, lambda_per_sample * static_cast<double>(train.size()));
    out.json("model.json", clf);
  });

  Json metrics;
  out.stage("metrics", [&] {
    const auto test_labels = test.labels();
    const auto train_labels = train.labels();
    const auto m_test = margins(clf, test);
    const auto m_train = margins(clf, train);
    const auto curve = pr_curve(m_test, test_labels, cfg.metrics.n_thresholds);
    out.csv("pr_curve.csv", pr_curve_csv(curve));
    out.csv("predictions.csv", predictions_csv(clf, test));

    const auto tests = predict_matrix(ens.learners, test);
    Json singles = Json::array();
    std::optional<double> best_single;
    for (std::size_t i = 0; i < ens.learners.size(); ++i) {
      std::vector<double> mi(test.size());
      for (std::size_t s = 0; s < test.size(); ++s) mi[s] = tests(i, s);
      const auto p = at_recall(mi, test_labels, cfg.metrics);
      if (p && (!best_single || *p > *best_single)) best_single = p;
      singles.push_back({{"kind", to_string(ens.learners[i].kind())}, {"precision_at_recall", optional_json(p)}});
    }
    metrics = {{"recall_target", cfg.metrics.recall_target},
               {"test_precision_at_recall", optional_json(at_recall(m_test, test_labels, cfg.metrics))},
               {"train_precision_at_recall", optional_json(at_recall(m_train, train_labels, cfg.metrics))},
               {"test_at_threshold", pr_json(confusion(predict_labels(clf, test), test_labels))},
               {"train_at_threshold", pr_json(confusion(predict_labels(clf, train), train_labels))},
               {"best_single_learner_precision_at_recall", optional_json(best_single)},
               {"single_learners", singles}};
  });

  Json report = {{"n_train", train.size()},
                 {"n_test", test.size()},
                 {"n_learners", ens.learners.size()},
                 {"n_qubits", q.size()},
                 {"variant", to_string(ens_cfg.variant)},
                 {"lambda_per_sample", lambda_per_sample},
                 {"lambda", q.lambda()},
                 {"lambda_tuning", tuning},
                 {"solve", trace_summary(solved, reference_cost)},
                 {"n_selected", solved.best.count()},
                 {"threshold", clf.threshold},
                 {"metrics", metrics},
                 {"stage_timings", "timings.txt"}};
  out.json("report.json", report);
  out.finish();
  if (!metrics["test_precision_at_recall"].is_null()) {
    std::cout << "test precision at recall " << cfg.metrics.recall_target << ": "
              << metrics["test_precision_at_recall"].get<double>() << '\n';
  }
}

void cmd_solve(const CommonOptions& o, const std::filesystem::path& qubo_path) {
  Json raw = apply_overrides(load_config(o.config), o, true);
  if (!qubo_path.empty()) raw["qubo"] = qubo_path.string();
  const auto cfg = raw.get<SolveConfig>();
  if (cfg.qubo.empty()) throw std::invalid_argument("solve: no QUBO file given (--qubo or \"qubo\" in the config)");
  // The manifest identifies the input by content, not by path.
  Json effective = raw;
  effective.erase("qubo");
  effective["qubo_sha256"] = sha256_file(cfg.qubo);
  RunOutput out(o.out, "solve", effective, cfg.seed);

  QuboMatrix q;
  out.stage("load", [&] { q = read_json_file(cfg.qubo).get<QuboMatrix>(); });
  SolveOutcome solved;
  double reference_cost = 0.0;
  out.stage("solve", [&] {
    solved = run_solver(q, cfg.solver.name, cfg.solver, derive_seed(cfg.seed, "solver"));
    reference_cost = cfg.solver.name == "brute_force" ? solved.cost
                                                      : reference_solution(q, derive_seed(cfg.seed, "reference")).second;
    out.csv("trace.csv", solved.trace.to_csv(gap_reference(reference_cost)));
  });
  auto summary = trace_summary(solved, reference_cost);
  summary["n"] = q.size();
  out.json("solution.json", summary);
  out.finish();
  std::cout << solved.best.to_string() << ' ' << solved.cost << '\n';
}

void cmd_bench(const CommonOptions& o) {
  Json raw = apply_overrides(load_config(o.config), o, false);
  if (o.solver) raw["solvers"] = Json::array({*o.solver});
  const auto cfg = raw.get<BenchConfig>();
  RunOutput out(o.out, "bench", raw, cfg.seed);

  auto settings = cfg.settings;
  settings.uniform_cycles = cfg.n_cycles;
  settings.sa_restarts = cfg.n_cycles;
  settings.rgs.n_cycles = cfg.n_cycles;
  settings.qaoa.shots_per_iter = std::max<std::size_t>(1, cfg.n_cycles / std::max<std::size_t>(1, settings.qaoa.n_outer));
  auto cache = std::make_shared<ClusterCache>(settings.rgs.pulse.build(), kDefaultC6);

  std::map<std::string, std::vector<std::pair<double, double>>> points;
  Json sizes = Json::array();
  for (const std::size_t n : cfg.sizes) {
    std::vector<QuboMatrix> qs;
    std::vector<double> refs;
    out.stage("instances_N" + std::to_string(n), [&] {
      for (std::size_t k = 0; k < cfg.n_instances; ++k) {
        qs.push_back(random_positive_qubo(n, derive_seed(cfg.seed, "bench.qubo", n * 1000 + k)));
        refs.push_back(reference_solution(qs.back(), derive_seed(cfg.seed, "bench.reference", n * 1000 + k)).second);
      }
    });
    Json by_solver = Json::object();
    for (const auto& name : cfg.solvers) {
      out.stage(name + "_N" + std::to_string(n), [&] {
        std::vector<SolveTrace> traces;
        Json instances = Json::array();
        double sum = 0.0;
        std::size_t reached = 0;
        for (std::size_t k = 0; k < qs.size(); ++k) {
          auto s = run_solver(qs[k], name, settings, derive_seed(cfg.seed, "bench." + name, n * 1000 + k), cache);
          const auto c2g = cycles_to_gap(s.trace, refs[k], cfg.threshold);
          if (c2g) {
            sum += static_cast<double>(*c2g);
            ++reached;
          }
          instances.push_back({{"reference_cost", refs[k]},
                               {"best_cost", s.cost},
                               {"gap", gap_from_costs(s.cost, refs[k])},
                               {"cycles_to_gap", c2g ? Json(*c2g) : Json(nullptr)}});
          traces.push_back(std::move(s.trace));
        }
        const auto series = gap_convergence(traces, refs);
        out.csv("gap_" + name + "_N" + std::to_string(n) + ".csv", gap_series_csv(series));
        Json entry = {{"instances", instances}, {"reached", reached}, {"truncated", series.truncated}};
        entry["mean_cycles_to_gap"] = reached == qs.size() ? Json(sum / double(reached)) : Json(nullptr);
        if (reached == qs.size()) points[name].emplace_back(double(n), sum / double(reached));
        if (name == "uniform" && n <= cfg.uniform_exact_max_n) {
          double e = 0.0;
          for (std::size_t k = 0; k < qs.size(); ++k) e += uniform_expected_cycles(qs[k], refs[k], cfg.threshold, cfg.uniform_exact_max_n);
          entry["expected_cycles_to_gap"] = e / double(qs.size());
        }
        by_solver[name] = entry;
      });
    }
    sizes.push_back({{"n", n}, {"solvers", by_solver}});
  }

  Json scaling = Json::object();
  for (const auto& name : cfg.solvers) {
    const auto& pts = points[name];
    if (pts.size() >= 3) {
      Json f;
      to_json(f, fit_scaling(pts));
      scaling[name] = f;
    } else {
      scaling[name] = {{"fit", nullptr},
                       {"reason", "fewer than three sizes where every instance reached the threshold"},
                       {"points", pts}};
    }
  }
  out.json("scaling.json", scaling);
  out.json("bench.json", {{"threshold", cfg.threshold},
                          {"n_cycles", cfg.n_cycles},
                          {"n_instances", cfg.n_instances},
                          {"sizes", sizes},
                          {"cluster_cache", {{"hits", cache->hits()}, {"misses", cache->misses()}}}});
  out.finish();
}

void cmd_report(const std::filesystem::path& run_dir) {
  const auto manifest = read_json_file(run_dir / "manifest.json");
  const auto command = manifest.at("command").get<std::string>();
  std::cout << "run: " << command << " (seed " << manifest.at("seed") << ", version " << manifest.at("version")
            << ")\n";
  for (const auto& [name, digest] : manifest.at("outputs").items()) {
    const bool ok = std::filesystem::exists(run_dir / name) && sha256_file(run_dir / name) == digest;
    std::cout << "  " << name << (ok ? "  ok" : "  MODIFIED OR MISSING") << '\n';
  }
  if (command == "train") {
    const auto r = read_json_file(run_dir / "report.json");
    const auto& m = r.at("metrics");
    std::cout << "learners: " << r.at("n_learners") << " (" << r.at("variant").get<std::string>()
              << "), selected: " << r.at("n_selected") << '\n'
              << "solver: " << r.at("solve").at("solver").get<std::string>() << ", gap " << r.at("solve").at("gap")
              << ", cycles " << r.at("solve").at("cycles_used") << '\n'
              << "test precision at recall " << m.at("recall_target") << ": " << m.at("test_precision_at_recall")
              << " (best single learner " << m.at("best_single_learner_precision_at_recall") << ")\n";
  } else if (command == "bench") {
    const auto b = read_json_file(run_dir / "bench.json");
    for (const auto& s : b.at("sizes")) {
      for (const auto& [name, e] : s.at("solvers").items()) {
        std::cout << "N=" << s.at("n") << ' ' << name << ": mean cycles to gap " << e.at("mean_cycles_to_gap")
                  << " (" << e.at("reached") << " instances reached)\n";
      }
    }
    const auto sc = read_json_file(run_dir / "scaling.json");
    for (const auto& [name, f] : sc.items()) {
      if (f.contains("model")) {
        std::cout << name << " scaling: " << f.at("model").get<std::string>() << " a=" << f.at("a")
                  << " b=" << f.at("b") << " r2=" << f.at("r_squared") << '\n';
      } else {
        std::cout << name << " scaling: no fit\n";
      }
    }
  } else if (command == "solve") {
    const auto s = read_json_file(run_dir / "solution.json");
    std::cout << "best " << s.at("best_bitstring").get<std::string>() << " cost " << s.at("best_cost") << " gap "
              << s.at("gap") << '\n';
  } else if (command == "gen-data") {
    std::cout << read_json_file(run_dir / "data_summary.json").dump(2) << '\n';
  }
}

}  // namespace qboost::cli
