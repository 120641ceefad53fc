#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "csrpe/cli.hpp"
#include "csrpe/model.hpp"
#include "test_support.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

using namespace csrpe;
using namespace csrpe::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

/// "criterion,value" rows of eval output as a map.
std::map<std::string, double> eval_rows(const std::string& s) {
  std::map<std::string, double> m;
  const auto ls = lines(s);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto comma = ls[i].find(',');
    m[ls[i].substr(0, comma)] = std::stod(ls[i].substr(comma + 1));
  }
  return m;
}

const fs::path dir = temp_dir("cli");

fs::path synth_file(const std::string& name, int K, int d, int n, int seed) {
  const auto p = dir / name;
  const auto r = cli({"synth", "--labels", std::to_string(K), "--features", std::to_string(d), "-n",
                      std::to_string(n), "--seed", std::to_string(seed), "--out", p.string()});
  REQUIRE(r.code == 0);
  return p;
}

}  // namespace

TEST_CASE("synth writes a dataset that loads back unchanged") {
  const auto p = synth_file("synth.txt", 3, 5, 100, 2);
  const auto loaded = load_dataset(p, 3, 5);
  const auto direct = synth_generate(3, 5, 100, 2, 0.0);
  REQUIRE(loaded.size() == direct.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(label_equal(loaded.instances[i].y, direct.instances[i].y));
    CHECK(densify(loaded.instances[i].x) == densify(direct.instances[i].x));
  }
  const auto again = dir / "synth_again.txt";
  REQUIRE(cli({"synth", "--labels", "3", "--features", "5", "-n", "100", "--seed", "2", "--out",
               again.string()})
              .code == 0);
  CHECK(slurp(p) == slurp(again));
}

TEST_CASE("train, then load: predictions match the in-memory model") {
  const auto data = synth_file("train.txt", 3, 6, 100, 4);
  const auto model_path = dir / "train.model";
  const auto start = std::chrono::steady_clock::now();
  const auto r = cli({"train", "--data", data.string(), "--labels", "3", "--features", "6",
                      "--criterion", "f1", "--algo", "csrpe", "-M", "100", "--out",
                      model_path.string()});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(r.code == 0);
  CHECK(secs < 10.0);
  CHECK(r.out.find("M=28") != std::string::npos);
  CHECK(r.out.find("requested 100") != std::string::npos);

  const auto ds = load_dataset(data, 3, 6);
  ModelConfig config;
  config.code_length = 100;
  config.seed = 1;
  const auto memory = train_csrpe(ds, cost_by_name("f1"), config);
  const auto loaded = load_model(model_path);
  std::string expected;
  for (const auto& inst : ds.instances) {
    CHECK(label_equal(predict(loaded, inst.x), predict(memory, inst.x)));
    expected += format_label_indices(predict(memory, inst.x)) + "\n";
  }
  const auto pred = cli({"predict", "--model", model_path.string(), "--data", data.string()});
  REQUIRE(pred.code == 0);
  CHECK(pred.out == expected);

  // re-running overwrites byte-identically
  const auto first = slurp(model_path);
  REQUIRE(cli({"train", "--data", data.string(), "--labels", "3", "--features", "6", "-M", "100",
               "--out", model_path.string()})
              .code == 0);
  CHECK(slurp(model_path) == first);
}

TEST_CASE("eval on separable training data") {
  const auto data = synth_file("sep.txt", 6, 10, 200, 2);
  const auto ham_model = dir / "sep_hamming.model";
  REQUIRE(cli({"train", "--data", data.string(), "--labels", "6", "--features", "10",
               "--criterion", "hamming", "-M", "300", "--out", ham_model.string()})
              .code == 0);
  const auto ham = cli({"eval", "--model", ham_model.string(), "--data", data.string()});
  REQUIRE(ham.code == 0);
  CHECK(lines(ham.out).front() == "criterion,value");
  const auto rows = eval_rows(ham.out);
  CHECK(rows.size() == 5);
  CHECK(rows.at("f1") >= 0.95);

  // Under the F1 cost the empty label vector ties on every pair it is not part
  // of, so empty-truth rows are the weak spot; the rest is fit closely.
  const auto f1_model = dir / "sep_f1.model";
  REQUIRE(cli({"train", "--data", data.string(), "--labels", "6", "--features", "10",
               "--criterion", "f1", "-M", "300", "--out", f1_model.string()})
              .code == 0);
  const auto f1 = eval_rows(cli({"eval", "--model", f1_model.string(), "--data", data.string()}).out);
  CHECK(f1.at("f1") >= 0.85);
}

TEST_CASE("bench output shape and verdicts") {
  const auto data = synth_file("bench.txt", 3, 6, 80, 6);
  const auto out = dir / "bench.csv";
  auto r = cli({"bench", "--data", data.string(), "--labels", "3", "--features", "6", "--algos",
                "csrpe,br,cc", "--runs", "3", "-M", "20", "--out", out.string()});
  REQUIRE(r.code == 0);
  auto rows = lines(slurp(out));
  CHECK(rows.front() == "run,algorithm,criterion,value");
  CHECK(rows.size() == 1 + 3 * 3 * 4);
  auto summary = lines(slurp(dir / "bench_summary.csv"));
  CHECK(summary.front() == "algorithm,criterion,mean,ste,ttest_vs_csrpe");
  CHECK(summary.size() == 1 + 3 * 4);

  const auto same = dir / "same.csv";
  r = cli({"bench", "--data", data.string(), "--labels", "3", "--features", "6", "--algos",
           "br,br", "--runs", "3", "--criteria", "f1,hamming", "--out", same.string()});
  REQUIRE(r.code == 0);
  summary = lines(slurp(dir / "same_summary.csv"));
  REQUIRE(summary.size() == 5);
  for (std::size_t i = 1; i < summary.size(); ++i) {
    CHECK(summary[i].substr(summary[i].rfind(',') + 1) == "tie");
  }

  const auto single = dir / "single.csv";
  const auto single_summary = dir / "single_sum.csv";
  r = cli({"bench", "--data", data.string(), "--labels", "3", "--features", "6", "--algos",
           "csrpe,br", "--runs", "1", "-M", "20", "--out", single.string(), "--summary",
           single_summary.string()});
  REQUIRE(r.code == 0);
  summary = lines(slurp(single_summary));
  CHECK(lines(slurp(single)).size() == 1 + 2 * 4);
  for (std::size_t i = 1; i < summary.size(); ++i) {
    CHECK(summary[i].find(",0,n/a") != std::string::npos);
  }
}

TEST_CASE("al-sim writes budget + 1 rows") {
  const auto data = synth_file("al.txt", 3, 6, 100, 8);
  const auto out = dir / "al.csv";
  const auto r = cli({"al-sim", "--data", data.string(), "--labels", "3", "--features", "6",
                      "--budget", "5", "--init", "10", "-M", "20", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(out));
  CHECK(rows.front() == "t,queried_index,test_metric");
  CHECK(rows.size() == 7);
  CHECK(rows[1].rfind("0,-1,", 0) == 0);
}

TEST_CASE("config file supplies flags; the command line wins") {
  const auto data = synth_file("cfg.txt", 3, 6, 60, 9);
  const auto cfg = dir / "train.cfg";
  {
    std::ofstream f(cfg);
    f << "data=" << data.string() << "\nlabels=3\nfeatures=6\ncode-length=12\ncriterion=hamming\n";
  }
  auto r = cli({"train", "--config", cfg.string(), "--out", (dir / "cfg.model").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("M=12") != std::string::npos);
  CHECK(load_model(dir / "cfg.model").cost().name == "hamming");
  r = cli({"train", "--config", cfg.string(), "-M", "15", "--out", (dir / "cfg.model").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("M=15") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto missing = (dir / "no_such_file.txt").string();
  auto r = cli({"train", "--data", missing, "--labels", "3", "--features", "4", "--out",
                (dir / "x.model").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find(missing) != std::string::npos);
  CHECK(cli({"train", "--bogus"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"predict", "--model", missing, "--data", missing}).code == 2);

  const auto data = synth_file("codes.txt", 3, 4, 30, 1);
  CHECK(cli({"train", "--data", data.string(), "--labels", "3", "--features", "4", "--criterion",
             "nope", "--out", (dir / "x.model").string()})
            .code == 2);
  // label index out of range for the declared K is a data error
  r = cli({"train", "--data", data.string(), "--labels", "1", "--features", "4", "--out",
           (dir / "x.model").string()});
  CHECK(r.code != 0);
  CHECK(cli({"--help"}).code == 0);
}
