#include "csrpe/cli.hpp"

#include "csrpe/active.hpp"
#include "csrpe/baselines.hpp"
#include "csrpe/costs.hpp"
#include "csrpe/data.hpp"
#include "csrpe/format.hpp"
#include "csrpe/model.hpp"
#include "csrpe/rng.hpp"
#include "csrpe/stats.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

namespace csrpe {

namespace {

namespace fs = std::filesystem;

/// Bad flags, missing inputs, unknown names: exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string config;
  std::string data;
  std::string test;
  std::string model;
  std::string out;
  std::string summary;
  std::string extra_relevant;
  Index labels = 0;
  Index features = 0;
  std::string criterion = "f1";
  std::vector<std::string> criteria{"f1", "accuracy", "hamming", "rank"};
  std::vector<std::string> algos{"csrpe"};
  std::size_t code_length = 0;  // 0: command default
  std::string source = "uniform";
  std::string learner;          // empty: command default
  int tree_depth = TreeParams{}.max_depth;
  double min_leaf_weight = TreeParams{}.min_leaf_weight;
  int max_features = TreeParams{}.max_features;
  double l2 = LogisticParams{}.l2;
  double tol = LogisticParams{}.tol;
  int max_iter = LogisticParams{}.max_iter;
  std::uint64_t seed = 1;
  int threads = 1;
  std::size_t runs = 20;
  double ratio = 0.5;
  bool soft = false;
  // al-sim
  std::string strategy = "csrpe";
  std::size_t budget = 100;
  std::size_t init = 20;
  std::size_t retrain_every = 1;
  std::string evaluate = "aux";
  // synth
  std::size_t n = 0;
  double correlation = 0.0;
  double noise = 0.0;
  bool require_label = false;
};

void add_learner_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--learner", o.learner, "Base learner: tree or logistic");
  cmd->add_option("--tree-depth", o.tree_depth, "Maximum tree depth")->check(CLI::NonNegativeNumber);
  cmd->add_option("--min-leaf-weight", o.min_leaf_weight,
                  "Minimum child weight in mean-example-weight units")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-features", o.max_features, "Features tried per tree node (0 = all)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--l2", o.l2, "Logistic L2 penalty")->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol", o.tol, "Logistic gradient tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", o.max_iter, "Logistic Newton iterations")->check(CLI::PositiveNumber);
}

void add_config_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Flat key=value file mirroring the command-line flags");
}

bool given(const CLI::Option* opt, const std::vector<std::string>& args) {
  for (const auto& a : args) {
    for (const auto& n : opt->get_lnames()) {
      if (a == "--" + n || a.rfind("--" + n + "=", 0) == 0) return true;
    }
    for (const auto& n : opt->get_snames()) {
      if (a.rfind("-" + n, 0) == 0 && a.rfind("--", 0) != 0) return true;
    }
  }
  return false;
}

/// Appends `--key value` for each line of the --config file whose option is
/// not already on the command line.
std::vector<std::string> merge_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  const CLI::App* sub = nullptr;
  for (const auto* s : app.get_subcommands({})) {
    if (s->get_name() == args.front()) sub = s;
  }
  if (sub == nullptr) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("config file not found: " + path);
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::vector<std::string> extra;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw UsageError(path + ":" + std::to_string(no) + ": unknown key '" + key + "'");
    }
    if (given(opt, args)) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1") extra.push_back("--" + key);
    } else {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void add_common_flags(CLI::App* cmd, Options& o) {
  add_config_flag(cmd, o);
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--threads", o.threads, "Worker threads for training")->check(CLI::PositiveNumber);
}

void add_data_flags(CLI::App* cmd, Options& o, bool required) {
  auto* d = cmd->add_option("--data", o.data, "Dataset file (sparse multi-label format)");
  auto* k = cmd->add_option("--labels", o.labels, "Label count K")->check(CLI::PositiveNumber);
  auto* f = cmd->add_option("--features", o.features, "Feature dimension d")->check(CLI::PositiveNumber);
  if (required) {
    d->required();
    k->required();
    f->required();
  }
}

void require_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing ") + what);
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path);
}

LearnerConfig learner_config(const Options& o, LearnerKind fallback) {
  LearnerConfig cfg;
  try {
    cfg.kind = o.learner.empty() ? fallback : learner_kind_from_string(o.learner);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg.tree.max_depth = o.tree_depth;
  cfg.tree.min_leaf_weight = o.min_leaf_weight;
  cfg.tree.max_features = o.max_features;
  cfg.logistic.l2 = o.l2;
  cfg.logistic.tol = o.tol;
  cfg.logistic.max_iter = o.max_iter;
  return cfg;
}

std::string checked_criterion(const std::string& name) {
  for (const auto& c : criterion_names()) {
    if (c == name) return name;
  }
  throw UsageError("unknown criterion '" + name + "'");
}

ModelConfig model_config(const Options& o, std::size_t default_length, LearnerKind default_learner) {
  ModelConfig cfg;
  cfg.code_length = o.code_length ? o.code_length : default_length;
  try {
    cfg.source = pair_source_from_string(o.source);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg.learner = learner_config(o, default_learner);
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  return cfg;
}

Dataset load_input(const Options& o) {
  require_input(o.data, "dataset file");
  return load_dataset(o.data, o.labels, o.features);
}

/// Writes to `path`, or to `fallback` when path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_train(const Options& o, std::ostream& out) {
  if (o.algos.size() != 1 || o.algos.front() != "csrpe") {
    throw UsageError("train writes CSRPE models only (--algo csrpe)");
  }
  if (o.out.empty()) throw UsageError("train needs --out");
  const Dataset ds = load_input(o);
  ModelConfig cfg = model_config(o, kDefaultCodeLength, LearnerKind::tree);
  if (!o.extra_relevant.empty()) {
    require_input(o.extra_relevant, "extra relevant-set file");
    for (auto& inst : load_dataset(o.extra_relevant, o.labels, o.features).instances) {
      cfg.extra_relevant.push_back(std::move(inst.y));
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const CsrpeModel model = train_csrpe(ds, cost_by_name(checked_criterion(o.criterion)), cfg);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  save_model(model, o.out);
  out << "trained M=" << model.code_length();
  if (model.codebook().shrunk()) out << " (requested " << cfg.code_length << ", pair universe exhausted)";
  out << " relevant=" << model.relevant().size() << " in " << elapsed.count() << " s\n";
  return 0;
}

CsrpeModel load_input_model(const Options& o) {
  require_input(o.model, "model file");
  return load_model(o.model);
}

int cmd_predict(const Options& o, std::ostream& out) {
  const CsrpeModel model = load_input_model(o);
  require_input(o.data, "dataset file");
  const Dataset ds = load_dataset(o.data, model.num_labels(), model.num_features());
  Sink sink(o.out, out);
  for (const auto& y : predict_all(model, ds, o.soft ? CodeMode::soft : CodeMode::hard)) {
    sink.get() << format_label_indices(y) << '\n';
  }
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const CsrpeModel model = load_input_model(o);
  require_input(o.data, "dataset file");
  const Dataset ds = load_dataset(o.data, model.num_labels(), model.num_features());
  const auto predictions = predict_all(model, ds, o.soft ? CodeMode::soft : CodeMode::hard);
  Sink sink(o.out, out);
  sink.get() << "criterion,value\n";
  for (const auto& name : criterion_names()) {
    const CostFunction c = criterion(name);
    double total = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) total += c(ds.instances[i].y, predictions[i]);
    sink.get() << name << ',' << format_double(total / static_cast<double>(ds.size())) << '\n';
  }
  return 0;
}

double mean_criterion(const Dataset& test, const std::vector<LabelVector>& predictions,
                      const CostFunction& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) total += c(test.instances[i].y, predictions[i]);
  return total / static_cast<double>(test.size());
}

int cmd_bench(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw UsageError("bench needs --out");
  if (o.runs < 1) throw UsageError("--runs must be at least 1");
  if (o.algos.empty() || o.criteria.empty()) throw UsageError("bench needs algorithms and criteria");
  for (const auto& a : o.algos) {
    if (a != "csrpe" && a != "br" && a != "cc") throw UsageError("unknown algorithm '" + a + "'");
  }
  for (const auto& c : o.criteria) checked_criterion(c);
  const Dataset ds = load_input(o);
  const ModelConfig base = model_config(o, kDefaultCodeLength, LearnerKind::tree);

  // values[algo position][criterion position][run]
  std::vector<std::vector<std::vector<double>>> values(
      o.algos.size(), std::vector<std::vector<double>>(o.criteria.size()));
  Sink runs_out(o.out, out);
  runs_out.get() << "run,algorithm,criterion,value\n";
  for (std::size_t r = 0; r < o.runs; ++r) {
    const std::uint64_t run_seed = mix_seed(o.seed, r);
    const auto [train, test] = random_split(ds, o.ratio, run_seed);
    ModelConfig cfg = base;
    cfg.seed = run_seed;
    for (std::size_t a = 0; a < o.algos.size(); ++a) {
      const std::string& algo = o.algos[a];
      std::vector<LabelVector> shared;
      if (algo == "br") {
        const BrModel m = train_br(train, cfg.learner, run_seed, cfg.threads);
        for (const auto& inst : test.instances) shared.push_back(predict_br(m, inst.x));
      } else if (algo == "cc") {
        const CcModel m = train_cc(train, cfg.learner, {}, run_seed);
        for (const auto& inst : test.instances) shared.push_back(predict_cc(m, inst.x));
      }
      for (std::size_t c = 0; c < o.criteria.size(); ++c) {
        const CostFunction crit = criterion(o.criteria[c]);
        double v;
        if (algo == "csrpe") {
          const CsrpeModel m = train_csrpe(train, as_cost(crit), cfg);
          v = mean_criterion(test, predict_all(m, test), crit);
        } else {
          v = mean_criterion(test, shared, crit);
        }
        values[a][c].push_back(v);
        runs_out.get() << r << ',' << algo << ',' << o.criteria[c] << ',' << format_double(v) << '\n';
      }
    }
  }

  std::string summary_path = o.summary;
  if (summary_path.empty()) {
    fs::path p(o.out);
    summary_path = (p.parent_path() / (p.stem().string() + "_summary.csv")).string();
  }
  std::ofstream summary(summary_path, std::ios::binary);
  if (!summary) throw Error("cannot write " + summary_path);
  std::ostringstream table;
  table << "algorithm,criterion,mean,ste,ttest_vs_" << o.algos.front() << '\n';
  for (std::size_t a = 0; a < o.algos.size(); ++a) {
    for (std::size_t c = 0; c < o.criteria.size(); ++c) {
      const MeanSte ms = mean_ste(values[a][c]);
      std::string verdict = "n/a";
      if (o.runs >= 2) {
        const Better dir = criterion(o.criteria[c]).higher_is_better() ? Better::higher : Better::lower;
        verdict = to_string(paired_t_test(values[a][c], values[0][c], dir).verdict);
      }
      table << o.algos[a] << ',' << o.criteria[c] << ',' << format_double(ms.mean) << ','
            << format_double(ms.ste) << ',' << verdict << '\n';
    }
  }
  summary << table.str();
  out << table.str();
  return 0;
}

int cmd_al(const Options& o, std::ostream& out) {
  Dataset pool = load_input(o);
  Dataset test;
  if (!o.test.empty()) {
    require_input(o.test, "test dataset file");
    test = load_dataset(o.test, o.labels, o.features);
  } else {
    std::tie(pool, test) = random_split(pool, o.ratio, o.seed);
  }
  ALConfig cfg;
  cfg.init_labeled = o.init;
  cfg.budget = o.budget;
  try {
    cfg.strategy = query_strategy_from_string(o.strategy);
    cfg.evaluate = curve_model_from_string(o.evaluate);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  cfg.criterion = checked_criterion(o.criterion);
  cfg.model = model_config(o, 300, LearnerKind::logistic);
  cfg.aux_learner = learner_config(Options{}, LearnerKind::logistic);
  cfg.aux_learner.logistic = cfg.model.learner.logistic;
  cfg.retrain_every = o.retrain_every;
  cfg.seed = o.seed;
  const auto curve = run_al(pool, test, cfg);
  Sink sink(o.out, out);
  sink.get() << "t,queried_index,test_metric\n";
  for (const auto& p : curve) {
    sink.get() << p.t << ',' << p.queried << ',' << format_double(p.value) << '\n';
  }
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const Dataset ds =
      synth_generate(o.labels, o.features, o.n, o.seed, o.correlation, o.noise, o.require_label);
  Sink sink(o.out, out);
  write_dataset(sink.get(), ds);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Cost-sensitive reference pair encoding for multi-label classification", "csrpe"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train a CSRPE model and write it to --out");
  add_common_flags(train, o);
  add_data_flags(train, o, true);
  add_learner_flags(train, o);
  train->add_option("--criterion", o.criterion, "f1, accuracy, hamming, rank or zero_one");
  train->add_option("--algo", o.algos, "Algorithm (csrpe)")->expected(1);
  train->add_option("-M,--code-length", o.code_length, "Code length (default 3000)");
  train->add_option("--source", o.source, "Reference pair source: uniform or empirical");
  train->add_option("--extra-relevant", o.extra_relevant,
                    "Dataset file whose label vectors join the relevant set");
  train->add_option("--out", o.out, "Model output path");

  auto* predict_cmd = app.add_subcommand("predict", "Predict label vectors with a trained model");
  add_config_flag(predict_cmd, o);
  predict_cmd->add_option("--model", o.model, "Model file")->required();
  predict_cmd->add_option("--data", o.data, "Dataset file")->required();
  predict_cmd->add_flag("--soft", o.soft, "Decode soft bit scores instead of hard bits");
  predict_cmd->add_option("--out", o.out, "Output path (default stdout)");

  auto* eval = app.add_subcommand("eval", "Mean of every criterion on a labeled dataset");
  add_config_flag(eval, o);
  eval->add_option("--model", o.model, "Model file")->required();
  eval->add_option("--data", o.data, "Dataset file")->required();
  eval->add_flag("--soft", o.soft, "Decode soft bit scores instead of hard bits");
  eval->add_option("--out", o.out, "Output path (default stdout)");

  auto* bench = app.add_subcommand("bench", "Repeated random-split benchmark");
  add_common_flags(bench, o);
  add_data_flags(bench, o, true);
  add_learner_flags(bench, o);
  bench->add_option("--algo,--algos", o.algos, "Algorithms: csrpe, br, cc")->delimiter(',');
  bench->add_option("--criterion,--criteria", o.criteria, "Criteria to report")->delimiter(',');
  bench->add_option("-M,--code-length", o.code_length, "Code length (default 3000)");
  bench->add_option("--source", o.source, "Reference pair source: uniform or empirical");
  bench->add_option("--runs", o.runs, "Number of random splits");
  bench->add_option("--ratio", o.ratio, "Training fraction of each split");
  bench->add_option("--out", o.out, "Per-run CSV path");
  bench->add_option("--summary", o.summary, "Summary CSV path (default <out>_summary.csv)");

  auto* al = app.add_subcommand("al-sim", "Pool-based active learning simulation");
  add_common_flags(al, o);
  add_data_flags(al, o, true);
  add_learner_flags(al, o);
  al->add_option("--test", o.test, "Held-out test file (default: split --data by --ratio)");
  al->add_option("--ratio", o.ratio, "Pool fraction when splitting --data");
  al->add_option("--strategy", o.strategy, "csrpe or random");
  al->add_option("--budget", o.budget, "Number of queries T");
  al->add_option("--init", o.init, "Initial labeled instances");
  al->add_option("--criterion", o.criterion, "Criterion to optimise and report");
  al->add_option("-M,--code-length", o.code_length, "Code length (default 300)");
  al->add_option("--source", o.source, "Reference pair source: uniform or empirical");
  al->add_option("--retrain-every", o.retrain_every, "Retrain after every k queries");
  al->add_option("--evaluate", o.evaluate, "Model scored on the curve: aux (f_t) or csrpe");
  al->add_option("--out", o.out, "Learning-curve CSV path (default stdout)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_config_flag(synth, o);
  synth->add_option("--labels", o.labels, "Label count K")->required();
  synth->add_option("--features", o.features, "Feature dimension d")->required();
  synth->add_option("-n,--instances", o.n, "Number of instances")->required();
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--correlation", o.correlation, "Adjacent-label coupling in [0,1]");
  synth->add_option("--noise", o.noise, "Score noise standard deviation");
  synth->add_flag("--require-label", o.require_label, "Give every instance at least one label");
  synth->add_option("--out", o.out, "Output path (default stdout)");

  std::vector<std::string> merged;
  try {
    merged = merge_config(app, args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<std::string> reversed(merged.rbegin(), merged.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(o, out);
    if (*predict_cmd) return cmd_predict(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*al) return cmd_al(o, out);
    if (*synth) return cmd_synth(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace csrpe
