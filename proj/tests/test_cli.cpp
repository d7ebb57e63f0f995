#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "semprune/pipeline.hpp"
#include "workspace.hpp"

using namespace semprune;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const testing::Workspace& workspace() {
  static const auto ws = testing::make_workspace(fs::temp_directory_path() / "semprune_test_cli" / "ws");
  return ws;
}

fs::path run_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "semprune_test_cli" / name;
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> solutions_in(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& cat : testing::toy_categories()) out.push_back((dir / (cat.first + ".solution.json")).string());
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string read(const fs::path& p) { return io::read_file(p); }

}  // namespace

TEST_CASE("prune writes solutions, folds and summary", "[cli]") {
  const auto& ws = workspace();
  const auto out = run_dir("prune_basic");
  const auto r = invoke({"--config", ws.config.string(), "--out", out.string(), "prune"});
  REQUIRE(r.code == 0);
  for (const auto& [name, words] : testing::toy_categories()) {
    CHECK(fs::exists(out / (name + ".solution.json")));
    CHECK(fs::exists(out / (name + ".folds.csv")));
    const auto j = nlohmann::json::parse(read(out / (name + ".solution.json")));
    CHECK(j.at("category") == name);
    CHECK(j.at("solution").at("selected_rho").get<double>() >= j.at("solution").at("baseline_rho").get<double>());
  }
  const auto summary = read(out / "prune_summary.csv");
  CHECK(summary.rfind("category,baseline_mean,baseline_sd,pruned_mean,pruned_sd,t,dof", 0) == 0);
  const auto meta = read(out / "prune.meta.json");
  CHECK(meta.find(ws.root.string()) == std::string::npos);
  CHECK(meta.find("vectors.txt") != std::string::npos);

  const auto sol = cli::read_solution(out / "birds.solution.json");
  CHECK(sol.category == "birds");
  CHECK(sol.n_features == ws.n_features);
  CHECK(sol.solution.selected.size() >= 2);
  REQUIRE(sol.cross_validation);
  CHECK(sol.cross_validation->folds.size() == 8);
}

TEST_CASE("every command is byte-stable across runs and worker counts", "[cli]") {
  const auto& ws = workspace();
  std::vector<std::map<std::string, std::string>> snaps;
  for (const std::string workers : {"1", "8", "1"}) {
    const auto out = run_dir("stable_" + std::to_string(snaps.size()));
    const std::vector<std::string> base{"--config", ws.config.string(), "--out", out.string(), "--workers", workers};
    REQUIRE(invoke(concat(base, {"prune"})).code == 0);
    REQUIRE(invoke(concat(concat(base, {"overlap"}), solutions_in(out))).code == 0);
    REQUIRE(invoke(concat(concat(base, {"interpret"}), solutions_in(out))).code == 0);
    REQUIRE(invoke(concat(concat(base, {"probe"}), solutions_in(out))).code == 0);
    REQUIRE(invoke(concat(base, {"count-corpus"})).code == 0);
    snaps.push_back(testing::snapshot(out));
  }
  REQUIRE(snaps[0].size() >= 20);
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    REQUIRE(snaps[k].size() == snaps[0].size());
    for (const auto& [name, bytes] : snaps[0]) {
      INFO(name);
      REQUIRE(snaps[k].count(name));
      CHECK(snaps[k].at(name) == bytes);
    }
  }
}

TEST_CASE("missing embedding words are a user error naming the word", "[cli]") {
  const auto& ws = workspace();
  const auto ratings = ws.root / "zoo.tsv";
  testing::write_text(ratings, "robin\tzebra\t3\nrobin\tcrow\t5\ncrow\tzebra\t2\nowl\tzebra\t1\nowl\trobin\t4\nowl\tcrow\t6\n");
  const auto out = run_dir("missing");
  const auto r = invoke({"--embeddings", ws.embeddings.string(), "--out", out.string(), "prune", "--category", "zoo",
                      "--ratings", ratings.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("zebra") != std::string::npos);
}

TEST_CASE("overlap argument checks and identical inputs", "[cli]") {
  const auto& ws = workspace();
  const auto out = run_dir("overlap");
  REQUIRE(invoke({"--config", ws.config.string(), "--out", out.string(), "--workers", "2", "prune", "--no-cv"}).code == 0);
  CHECK_FALSE(fs::exists(out / "prune_summary.csv"));
  const auto birds = (out / "birds.solution.json").string();
  const auto single = invoke({"--out", out.string(), "overlap", birds});
  CHECK(single.code == 2);
  CHECK(single.err.find("at least 2") != std::string::npos);

  REQUIRE(invoke({"--out", out.string(), "overlap", birds, birds}).code == 0);
  CHECK(read(out / "overlap.csv") == "category,birds,birds\nbirds,1,1\nbirds,1,1\n");
  const auto retention = read(out / "retention.csv");
  CHECK(retention.rfind("feature,n_categories\n", 0) == 0);
}

TEST_CASE("interpret with no significant words writes header-only hit lists", "[cli]") {
  const auto& ws = workspace();
  const auto out = run_dir("interpret_empty");
  REQUIRE(invoke({"--config", ws.config.string(), "--out", out.string(), "prune", "--no-cv"}).code == 0);
  const auto r = invoke(concat({"--config", ws.config.string(), "--out", out.string(), "interpret", "--alpha", "1e-12"},
                            solutions_in(out)));
  REQUIRE(r.code == 0);
  for (const auto& [name, words] : testing::toy_categories()) {
    CHECK(read(out / (name + ".hits.pruned.csv")) == "word,rho,p,nonzero_fraction,frequency_rank\n");
    CHECK(read(out / (name + ".hits.full.csv")) == "word,rho,p,nonzero_fraction,frequency_rank\n");
  }
}

TEST_CASE("stale corpus caches are rebuilt with a warning", "[cli]") {
  const auto& ws = workspace();
  const auto out = run_dir("stale");
  fs::create_directories(out);
  const auto corpus = out / "corpus_copy.txt";
  fs::copy_file(ws.corpus, corpus);
  const auto cache = out / "copy.cache";
  const auto first = invoke({"--out", out.string(), "count-corpus", "--corpus", corpus.string(), "--cache", cache.string()});
  REQUIRE(first.code == 0);
  CHECK(first.err.empty());
  const auto again = invoke({"--out", out.string(), "count-corpus", "--corpus", corpus.string(), "--cache", cache.string()});
  CHECK(again.out.find("cache up to date") != std::string::npos);
  std::ofstream(corpus, std::ios::app) << "an extra line\n";
  const auto stale = invoke({"--out", out.string(), "count-corpus", "--corpus", corpus.string(), "--cache", cache.string()});
  CHECK(stale.code == 0);
  CHECK(stale.err.find("warning") != std::string::npos);
}

TEST_CASE("probe rejects k above the feature count", "[cli]") {
  const auto& ws = workspace();
  const auto out = run_dir("probe_k");
  REQUIRE(invoke({"--config", ws.config.string(), "--out", out.string(), "prune", "--no-cv"}).code == 0);
  const auto r = invoke(concat({"--config", ws.config.string(), "--out", out.string(), "probe", "--k", "100"},
                            solutions_in(out)));
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  const auto ok = invoke(concat({"--config", ws.config.string(), "--out", out.string(), "probe"}, solutions_in(out)));
  REQUIRE(ok.code == 0);
  CHECK(ok.err.find("dropped") != std::string::npos);
  const auto matrix = read(out / "probe_matrix.csv");
  CHECK(matrix.rfind("category,Vision,Gustation,Olfaction,Audition\n", 0) == 0);
}

TEST_CASE("usage errors", "[cli]") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"prune", "--category", "x"}).code == 2);
  CHECK(invoke({"interpret", "nothing.json"}).code == 2);
  const auto& ws = workspace();
  CHECK(invoke({"--config", ws.config.string(), "interpret", "--alpha", "2", "x.json"}).code == 2);
  CHECK(invoke({"--config", (ws.root / "absent.json").string(), "prune"}).code == 2);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("prune") != std::string::npos);
}

TEST_CASE("the executable maps outcomes to exit codes", "[cli]") {
  const std::string exe = SEMPRUNE_CLI;
  const auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("--help") == 0);
  CHECK(status("--version") == 0);
  CHECK(status("overlap only_one.json") == 2);
}
