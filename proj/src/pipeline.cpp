#include "semprune/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "semprune/cooccur.hpp"
#include "semprune/embedding.hpp"
#include "semprune/error.hpp"
#include "semprune/interpret.hpp"
#include "semprune/probe.hpp"
#include "semprune/table_io.hpp"

namespace semprune::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

json number_or_null(double v, bool valid) { return valid ? json(v) : json(nullptr); }

std::string fmt(double v) { return io::format_double(v); }

json parameters(const RunConfig& c) {
  return json{{"window", c.window},
              {"frequency_cutoff", c.frequency_cutoff},
              {"nonzero_threshold", c.nonzero_threshold},
              {"alpha", c.alpha},
              {"probe_k", c.probe_k},
              {"plsr_components", c.plsr_components},
              {"cross_validate", c.cross_validate}};
}

json input_record(const fs::path& p) {
  return json{{"file", p.filename().string()}, {"fnv1a64", hex64(cooccur::corpus_fingerprint(p))}};
}

/// Sidecar provenance; kept free of absolute paths, timestamps, and the
/// worker count so reruns are byte-identical.
void write_metadata(const fs::path& out_dir, const std::string& command, const RunConfig& config,
                    const std::vector<fs::path>& inputs) {
  json meta{{"tool", kToolVersion}, {"command", command}, {"parameters", parameters(config)}};
  json files = json::array();
  for (const auto& p : inputs) files.push_back(input_record(p));
  meta["inputs"] = std::move(files);
  io::write_file(out_dir / (command + ".meta.json"), meta.dump(2) + "\n");
}

std::vector<std::string> read_word_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open word list " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

EmbeddingMatrix load_for_words(const fs::path& path, const std::vector<std::string>& words,
                               const std::string& context) {
  if (path.empty()) throw UsageError("no embedding file configured (--embeddings)");
  const std::unordered_set<std::string> keep(words.begin(), words.end());
  const auto loaded = load_embeddings(path, &keep);
  std::vector<std::string> missing;
  for (const auto& w : words) {
    if (!loaded.index_of(w)) missing.push_back(w);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& w : missing) list += (list.empty() ? "'" : ", '") + w + "'";
    throw Error(ErrorCode::UnknownWord, "no embedding for " + list + " in " + context);
  }
  return loaded.select_words(words);
}

// --- solution (de)serialization ----------------------------------------------

json cv_to_json(const prune::CrossValidation& cv) {
  json folds = json::array();
  for (const auto& f : cv.folds) {
    folds.push_back(json{{"target_word", f.target_word},
                         {"baseline_test_rho", number_or_null(f.baseline_test_rho, !f.degenerate)},
                         {"pruned_test_rho", number_or_null(f.pruned_test_rho, !f.degenerate)},
                         {"n_retained", f.n_retained},
                         {"n_test_pairs", f.n_test_pairs},
                         {"degenerate", f.degenerate}});
  }
  const auto s = prune::summarize(cv);
  json summary{{"n_folds", s.n_folds},
               {"n_degenerate", s.n_degenerate},
               {"baseline_mean", s.baseline_mean},
               {"baseline_sd", s.baseline_sd},
               {"pruned_mean", s.pruned_mean},
               {"pruned_sd", s.pruned_sd},
               {"retained_mean", s.retained_mean},
               {"retained_sd", s.retained_sd},
               {"t", s.t_test ? json(s.t_test->t) : json(nullptr)},
               {"dof", s.t_test ? json(s.t_test->dof) : json(nullptr)}};
  return json{{"folds", std::move(folds)}, {"summary", std::move(summary)}};
}

prune::CrossValidation cv_from_json(const json& j) {
  prune::CrossValidation cv;
  for (const auto& f : j.at("folds")) {
    prune::FoldResult r;
    r.target_word = f.at("target_word").get<std::string>();
    r.degenerate = f.at("degenerate").get<bool>();
    if (!r.degenerate) {
      r.baseline_test_rho = f.at("baseline_test_rho").get<double>();
      r.pruned_test_rho = f.at("pruned_test_rho").get<double>();
    }
    r.n_retained = f.at("n_retained").get<std::size_t>();
    r.n_test_pairs = f.at("n_test_pairs").get<std::size_t>();
    cv.folds.push_back(std::move(r));
  }
  const auto& s = j.at("summary");
  if (!s.at("t").is_null()) cv.t_test = stats::PairedT{s.at("t").get<double>(), s.at("dof").get<std::size_t>()};
  return cv;
}

std::string folds_csv(const prune::CrossValidation& cv) {
  std::vector<io::Row> rows;
  for (const auto& f : cv.folds) {
    rows.push_back({f.target_word, f.degenerate ? "" : fmt(f.baseline_test_rho),
                    f.degenerate ? "" : fmt(f.pruned_test_rho), std::to_string(f.n_retained),
                    std::to_string(f.n_test_pairs), f.degenerate ? "1" : "0"});
  }
  return io::to_csv({"target_word", "baseline_test_rho", "pruned_test_rho", "n_retained", "n_test_pairs",
                     "degenerate"},
                    rows);
}

io::Row summary_row(const std::string& category, const prune::CvSummary& s) {
  return {category,
          fmt(s.baseline_mean),
          fmt(s.baseline_sd),
          fmt(s.pruned_mean),
          fmt(s.pruned_sd),
          s.t_test ? fmt(s.t_test->t) : "",
          s.t_test ? std::to_string(s.t_test->dof) : "",
          fmt(s.retained_mean),
          fmt(s.retained_sd),
          std::to_string(s.n_folds),
          std::to_string(s.n_degenerate)};
}

// --- commands ------------------------------------------------------------------

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

int cmd_prune(const RunConfig& config, std::ostream& out) {
  require(!config.categories.empty(), "prune needs at least one category (--category/--ratings or config)");
  std::vector<io::Row> summary_rows;
  std::vector<fs::path> inputs{config.embeddings};

  for (const auto& cat : config.categories) {
    const auto ratings = load_human_ratings(cat.ratings);
    inputs.push_back(cat.ratings);
    std::vector<std::string> words = ratings.words;
    if (cat.words) {
      words = read_word_list(*cat.words);
      inputs.push_back(*cat.words);
    }
    const auto e = load_for_words(config.embeddings, words, "category '" + cat.name + "'");
    const auto human = human_structure(ratings, words);

    prune::PruneOptions options;
    options.workers = config.workers;

    SolutionFile file;
    file.category = cat.name;
    file.words = words;
    file.n_features = e.dims();
    file.solution = prune::prune(e, human, covered_pairs(human, PairIndex::complete(e.size())), options);
    if (config.cross_validate) {
      file.cross_validation = prune::cross_validate(e, human, options);
      io::write_file(config.output_dir / (cat.name + ".folds.csv"), folds_csv(*file.cross_validation));
      summary_rows.push_back(summary_row(cat.name, prune::summarize(*file.cross_validation)));
    }
    io::write_file(config.output_dir / (cat.name + ".solution.json"), solution_to_json(file, config));
    out << cat.name << ": " << file.solution.selected.size() << " of " << e.dims()
        << " features retained, training rho " << fmt(file.solution.baseline_rho) << " -> "
        << fmt(file.solution.selected_rho) << "\n";
  }

  if (config.cross_validate) {
    io::write_file(config.output_dir / "prune_summary.csv",
                   io::to_csv({"category", "baseline_mean", "baseline_sd", "pruned_mean", "pruned_sd", "t", "dof",
                               "retained_mean", "retained_sd", "n_folds", "n_degenerate"},
                              summary_rows));
  }
  write_metadata(config.output_dir, "prune", config, inputs);
  return 0;
}

std::vector<SolutionFile> read_solutions(const std::vector<std::string>& paths) {
  std::vector<SolutionFile> out;
  for (const auto& p : paths) out.push_back(read_solution(p));
  return out;
}

int cmd_overlap(const RunConfig& config, const std::vector<std::string>& solution_paths, std::ostream& out) {
  require(solution_paths.size() >= 2, "overlap needs at least 2 solution files");
  const auto solutions = read_solutions(solution_paths);
  prune::CategorySets sets;
  for (const auto& s : solutions) {
    if (s.n_features != solutions.front().n_features) {
      throw Error(ErrorCode::InvalidInput, "solutions come from different feature spaces");
    }
    sets.emplace_back(s.category, s.solution.selected);
  }

  const auto matrix = prune::overlap_matrix(sets);
  std::vector<io::Row> rows;
  for (std::size_t a = 0; a < matrix.categories.size(); ++a) {
    io::Row row{matrix.categories[a]};
    for (std::size_t b = 0; b < matrix.categories.size(); ++b) row.push_back(fmt(matrix.at(a, b)));
    rows.push_back(std::move(row));
  }
  io::Row header{"category"};
  header.insert(header.end(), matrix.categories.begin(), matrix.categories.end());
  io::write_file(config.output_dir / "overlap.csv", io::to_csv(header, rows));

  const auto counts = prune::retention_counts(sets, solutions.front().n_features);
  std::vector<io::Row> count_rows;
  for (std::size_t f = 0; f < counts.size(); ++f) count_rows.push_back({std::to_string(f), std::to_string(counts[f])});
  io::write_file(config.output_dir / "retention.csv", io::to_csv({"feature", "n_categories"}, count_rows));

  std::vector<fs::path> inputs(solution_paths.begin(), solution_paths.end());
  write_metadata(config.output_dir, "overlap", config, inputs);
  out << "overlap of " << sets.size() << " categories written\n";
  return 0;
}

std::string hits_csv(const std::vector<interpret::InterpretationHit>& hits) {
  std::vector<io::Row> rows;
  for (const auto& h : hits) {
    rows.push_back({h.word, fmt(h.rho), fmt(h.p), fmt(h.nonzero_fraction), std::to_string(h.frequency_rank)});
  }
  return io::to_csv({"word", "rho", "p", "nonzero_fraction", "frequency_rank"}, rows);
}

json interpretation_json(const interpret::Pc1Result& pc1, const interpret::Interpretation& result) {
  json scores = json::object();
  for (std::size_t i = 0; i < pc1.words.size(); ++i) scores[pc1.words[i]] = pc1.scores[i];
  json hits = json::array();
  for (const auto& h : result.hits) {
    hits.push_back(json{{"word", h.word},
                        {"rho", h.rho},
                        {"p", h.p},
                        {"nonzero_fraction", h.nonzero_fraction},
                        {"frequency_rank", h.frequency_rank},
                        {"pmi", h.pmi_values}});
  }
  const auto& c = result.counts;
  return json{{"n_features", pc1.features.size()},
              {"explained_variance_ratio", pc1.explained_variance_ratio},
              {"pc1_scores", std::move(scores)},
              {"filter_counts",
               {{"context_size", c.context_size},
                {"after_frequency", c.after_frequency},
                {"after_lexical", c.after_lexical},
                {"after_nonzero", c.after_nonzero},
                {"tested", c.tested},
                {"significant", c.significant}}},
              {"hits", std::move(hits)}};
}

int cmd_interpret(const RunConfig& config, const std::vector<std::string>& solution_paths, std::ostream& out,
                  std::ostream& err) {
  require(!solution_paths.empty(), "interpret needs at least one solution file");
  require(!config.corpus.empty(), "interpret needs a corpus (--corpus)");
  const fs::path cache = config.corpus_cache.empty() ? config.output_dir / "corpus.cache" : config.corpus_cache;
  auto counted = cooccur::load_or_count(config.corpus, cache, config.window, config.workers);
  if (counted.warning) err << "warning: " << *counted.warning << "\n";
  const auto& stats = counted.stats;

  interpret::InterpretOptions options;
  options.frequency_cutoff = config.frequency_cutoff;
  options.nonzero_threshold = config.nonzero_threshold;
  options.alpha = config.alpha;
  options.workers = config.workers;

  std::vector<io::Row> table;
  for (const auto& file : read_solutions(solution_paths)) {
    const auto e = load_for_words(config.embeddings, file.words, "category '" + file.category + "'");
    if (e.dims() != file.n_features) {
      throw Error(ErrorCode::InvalidInput, "embedding dimension differs from solution '" + file.category + "'");
    }
    const auto pc_pruned = interpret::pca_first_pc(e, file.solution.selected);
    const auto pc_full = interpret::pca_first_pc(e, e.all_features());
    const auto pruned = interpret::interpret_category(stats, pc_pruned, file.words, options);
    const auto full = interpret::interpret_category(stats, pc_full, file.words, options);
    const auto cmp = interpret::compare_pruned_full(pruned.hits, full.hits);
    for (const auto& w : pruned.missing_category_words) {
      err << "warning: category word '" << w << "' does not occur in the corpus\n";
    }

    io::write_file(config.output_dir / (file.category + ".hits.pruned.csv"), hits_csv(pruned.hits));
    io::write_file(config.output_dir / (file.category + ".hits.full.csv"), hits_csv(full.hits));
    json report{{"category", file.category},
                {"parameters", parameters(config)},
                {"category_words", file.words},
                {"missing_category_words", pruned.missing_category_words},
                {"context_size", pruned.counts.context_size},
                {"n_pruned", cmp.n_pruned},
                {"n_full", cmp.n_full},
                {"n_common", cmp.n_common},
                {"common", cmp.common},
                {"pruned", interpretation_json(pc_pruned, pruned)},
                {"full", interpretation_json(pc_full, full)}};
    io::write_file(config.output_dir / (file.category + ".interpret.json"), report.dump(2) + "\n");
    table.push_back({file.category, std::to_string(pruned.counts.context_size), std::to_string(cmp.n_pruned),
                     std::to_string(cmp.n_full), std::to_string(cmp.n_common)});
    out << file.category << ": context " << pruned.counts.context_size << ", hits pruned " << cmp.n_pruned
        << ", full " << cmp.n_full << ", common " << cmp.n_common << "\n";
  }
  io::write_file(config.output_dir / "interpret_summary.csv",
                 io::to_csv({"category", "context_size", "pruned", "full", "common"}, table));

  std::vector<fs::path> inputs{config.embeddings, config.corpus};
  inputs.insert(inputs.end(), solution_paths.begin(), solution_paths.end());
  write_metadata(config.output_dir, "interpret", config, inputs);
  return 0;
}

int cmd_probe(const RunConfig& config, const std::vector<std::string>& solution_paths, std::ostream& out,
              std::ostream& err) {
  require(!solution_paths.empty(), "probe needs at least one solution file");
  require(!config.binder_ratings.empty() && !config.binder_areas.empty(),
          "probe needs --binder ratings and --areas mapping");
  const auto binder = probe::load_binder(config.binder_ratings, config.binder_areas);
  const auto solutions = read_solutions(solution_paths);

  const std::unordered_set<std::string> keep(binder.words.begin(), binder.words.end());
  if (config.embeddings.empty()) throw UsageError("no embedding file configured (--embeddings)");
  const auto e = load_embeddings(config.embeddings, &keep);

  std::vector<std::pair<std::string, prune::PruneSolution>> categories;
  for (const auto& s : solutions) categories.emplace_back(s.category, s.solution);
  probe::ProbeOptions options;
  options.n_components = config.plsr_components;
  options.workers = config.workers;
  const auto matrix = probe::probe_all(categories, e, binder, config.probe_k, options);

  for (const auto& report : matrix.reports) {
    std::vector<io::Row> rows;
    for (std::size_t d = 0; d < report.dims.size(); ++d) {
      rows.push_back({report.dims[d], report.areas[binder.dim_area[d]], fmt(report.per_dimension_rho[d])});
    }
    io::write_file(config.output_dir / (report.category + ".probe.csv"),
                   io::to_csv({"dimension", "area", "rho"}, rows));
    json areas = json::object();
    for (std::size_t a = 0; a < report.areas.size(); ++a) areas[report.areas[a]] = report.per_area_rho[a];
    json j{{"category", report.category},
           {"parameters", parameters(config)},
           {"n_features_used", report.n_features_used},
           {"n_components", report.n_components},
           {"n_words", report.n_words},
           {"dropped_words", report.dropped_words},
           {"per_area_rho", std::move(areas)}};
    io::write_file(config.output_dir / (report.category + ".probe.json"), j.dump(2) + "\n");
  }
  if (!matrix.reports.empty() && !matrix.reports.front().dropped_words.empty()) {
    err << "warning: " << matrix.reports.front().dropped_words.size()
        << " rated words dropped (no embedding or repeated)\n";
  }

  std::vector<io::Row> rows;
  for (std::size_t c = 0; c < matrix.categories.size(); ++c) {
    io::Row row{matrix.categories[c]};
    for (std::size_t a = 0; a < matrix.areas.size(); ++a) row.push_back(fmt(matrix.at(c, a)));
    rows.push_back(std::move(row));
  }
  io::Row header{"category"};
  header.insert(header.end(), matrix.areas.begin(), matrix.areas.end());
  io::write_file(config.output_dir / "probe_matrix.csv", io::to_csv(header, rows));

  std::vector<fs::path> inputs{config.embeddings, config.binder_ratings, config.binder_areas};
  inputs.insert(inputs.end(), solution_paths.begin(), solution_paths.end());
  write_metadata(config.output_dir, "probe", config, inputs);
  out << "probe matrix " << matrix.categories.size() << " x " << matrix.areas.size() << " written ("
      << (matrix.reports.empty() ? 0 : matrix.reports.front().n_words) << " words)\n";
  return 0;
}

int cmd_count_corpus(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(!config.corpus.empty(), "count-corpus needs --corpus");
  const fs::path cache = config.corpus_cache.empty() ? config.output_dir / "corpus.cache" : config.corpus_cache;
  const auto counted = cooccur::load_or_count(config.corpus, cache, config.window, config.workers);
  if (counted.warning) err << "warning: " << *counted.warning << "\n";
  out << (counted.rebuilt ? "counted " : "cache up to date: ") << counted.stats.total_tokens() << " tokens, "
      << counted.stats.vocab_size() << " types, " << counted.stats.total_pairs() << " window pairs\n";
  return 0;
}

}  // namespace

// --- config -----------------------------------------------------------------------

RunConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path.filename().string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  RunConfig c;
  auto path_field = [&](const char* key, fs::path& target) {
    if (j.contains(key)) target = resolve(base, j.at(key).get<std::string>());
  };
  try {
    path_field("embeddings", c.embeddings);
    path_field("corpus", c.corpus);
    path_field("corpus_cache", c.corpus_cache);
    path_field("output_dir", c.output_dir);
    if (j.contains("binder")) {
      const auto& b = j.at("binder");
      if (b.contains("ratings")) c.binder_ratings = resolve(base, b.at("ratings").get<std::string>());
      if (b.contains("areas")) c.binder_areas = resolve(base, b.at("areas").get<std::string>());
    }
    if (j.contains("categories")) {
      for (const auto& cat : j.at("categories")) {
        CategoryConfig cc;
        cc.name = cat.at("name").get<std::string>();
        cc.ratings = resolve(base, cat.at("ratings").get<std::string>());
        if (cat.contains("words")) cc.words = resolve(base, cat.at("words").get<std::string>());
        c.categories.push_back(std::move(cc));
      }
    }
    c.window = j.value("window", c.window);
    c.frequency_cutoff = j.value("frequency_cutoff", c.frequency_cutoff);
    c.nonzero_threshold = j.value("nonzero_threshold", c.nonzero_threshold);
    c.alpha = j.value("alpha", c.alpha);
    c.probe_k = j.value("probe_k", c.probe_k);
    c.plsr_components = j.value("plsr_components", c.plsr_components);
    c.workers = j.value("workers", c.workers);
    c.cross_validate = j.value("cross_validate", c.cross_validate);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path.filename().string() + ": " + e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidInput, what); };
  if (c.window < 1) bad("window must be >= 1");
  if (c.frequency_cutoff < 1) bad("frequency cutoff must be >= 1");
  if (!(c.nonzero_threshold >= 0.0 && c.nonzero_threshold < 1.0)) bad("nonzero threshold must be in [0, 1)");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad("significance level must be in (0, 1)");
  if (c.probe_k < 1) bad("probe k must be >= 1");
  if (c.plsr_components < 1) bad("PLSR components must be >= 1");
  if (c.workers < 1) bad("worker count must be >= 1");
}

std::string solution_to_json(const SolutionFile& file, const RunConfig& config) {
  const auto& s = file.solution;
  json j{{"category", file.category},
         {"parameters", parameters(config)},
         {"words", file.words},
         {"n_features", file.n_features},
         {"solution",
          {{"baseline_rho", s.baseline_rho},
           {"selected_rho", s.selected_rho},
           {"n_pairs", s.n_pairs},
           {"n_selected", s.selected.size()},
           {"selected", s.selected},
           {"ranking", {{"order", s.ranking.order}, {"d_scores", s.ranking.d_scores}}},
           {"curve", s.curve}}}};
  if (file.cross_validation) j["cross_validation"] = cv_to_json(*file.cross_validation);
  return j.dump(2) + "\n";
}

SolutionFile read_solution(const fs::path& path) {
  try {
    const auto j = json::parse(io::read_file(path));
    SolutionFile f;
    f.category = j.at("category").get<std::string>();
    f.words = j.at("words").get<std::vector<std::string>>();
    f.n_features = j.at("n_features").get<std::size_t>();
    const auto& s = j.at("solution");
    f.solution.baseline_rho = s.at("baseline_rho").get<double>();
    f.solution.selected_rho = s.at("selected_rho").get<double>();
    f.solution.n_pairs = s.at("n_pairs").get<std::size_t>();
    f.solution.selected = s.at("selected").get<FeatureSet>();
    f.solution.ranking.order = s.at("ranking").at("order").get<std::vector<std::size_t>>();
    f.solution.ranking.d_scores = s.at("ranking").at("d_scores").get<std::vector<double>>();
    f.solution.curve = s.at("curve").get<std::vector<double>>();
    if (j.contains("cross_validation")) f.cross_validation = cv_from_json(j.at("cross_validation"));
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path.filename().string() + ": not a solution file (" + e.what() + ")");
  }
}

// --- entry point --------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supervised pruning of word-embedding features against human similarity judgments"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string embeddings;
  std::string out_dir;
  std::size_t workers = 0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--embeddings", embeddings, "GloVe-format text embeddings");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads");

  auto* prune_cmd = app.add_subcommand("prune", "rank, prune and cross-validate feature subsets per category");
  std::string category;
  std::string ratings;
  std::string words;
  bool no_cv = false;
  prune_cmd->add_option("--category", category, "category name");
  prune_cmd->add_option("--ratings", ratings, "pairwise human ratings (word_a, word_b, rating)");
  prune_cmd->add_option("--words", words, "category word list, one per line");
  prune_cmd->add_flag("--no-cv", no_cv, "skip leave-one-word-out cross-validation");

  std::vector<std::string> solutions;
  auto* overlap_cmd = app.add_subcommand("overlap", "Dice overlap and retention counts across categories");
  overlap_cmd->add_option("solutions", solutions, "solution files from prune");

  auto* interpret_cmd = app.add_subcommand("interpret", "PC1 / PMI correlation query on pruned and full features");
  interpret_cmd->add_option("solutions", solutions, "solution files from prune");

  auto* probe_cmd = app.add_subcommand("probe", "PLSR probing of top-k features against rated dimensions");
  probe_cmd->add_option("solutions", solutions, "solution files from prune");

  auto* count_cmd = app.add_subcommand("count-corpus", "count co-occurrences and write the corpus cache");

  std::string corpus;
  std::string cache;
  std::optional<std::size_t> window;
  std::optional<std::size_t> cutoff;
  std::optional<double> nonzero;
  std::optional<double> alpha;
  for (auto* sub : {interpret_cmd, count_cmd}) {
    sub->add_option("--corpus", corpus, "plain-text corpus, newline-delimited");
    sub->add_option("--cache", cache, "corpus statistics cache file");
    sub->add_option("--window", window, "co-occurrence window (default 2)");
  }
  interpret_cmd->add_option("--frequency-cutoff", cutoff, "keep the N most frequent words (default 15000)");
  interpret_cmd->add_option("--nonzero-threshold", nonzero, "minimum nonzero PMI share, strict (default 0.6)");
  interpret_cmd->add_option("--alpha", alpha, "significance level (default 0.05)");

  std::string binder;
  std::string areas;
  std::optional<std::size_t> k;
  std::optional<std::size_t> components;
  probe_cmd->add_option("--binder", binder, "rated words x dimensions table");
  probe_cmd->add_option("--areas", areas, "dimension to area mapping");
  probe_cmd->add_option("--k", k, "top-ranked features per category (default 60)");
  probe_cmd->add_option("--components", components, "PLSR components (default 30)");

  std::vector<std::string> argv_storage{"semprune"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!embeddings.empty()) config.embeddings = embeddings;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (workers > 0) config.workers = workers;
    if (!ratings.empty() || !category.empty()) {
      require(!ratings.empty() && !category.empty(), "--category and --ratings go together");
      CategoryConfig cc{category, ratings, std::nullopt};
      if (!words.empty()) cc.words = fs::path(words);
      config.categories = {cc};
    }
    if (no_cv) config.cross_validate = false;
    if (!corpus.empty()) config.corpus = corpus;
    if (!cache.empty()) config.corpus_cache = cache;
    if (window) config.window = *window;
    if (cutoff) config.frequency_cutoff = *cutoff;
    if (nonzero) config.nonzero_threshold = *nonzero;
    if (alpha) config.alpha = *alpha;
    if (!binder.empty()) config.binder_ratings = binder;
    if (!areas.empty()) config.binder_areas = areas;
    if (k) config.probe_k = *k;
    if (components) config.plsr_components = *components;
    validate(config);

    if (prune_cmd->parsed()) return cmd_prune(config, out);
    if (overlap_cmd->parsed()) return cmd_overlap(config, solutions, out);
    if (interpret_cmd->parsed()) return cmd_interpret(config, solutions, out, err);
    if (probe_cmd->parsed()) return cmd_probe(config, solutions, out, err);
    if (count_cmd->parsed()) return cmd_count_corpus(config, out, err);
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace semprune::cli
