#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semprune/pruner.hpp"

namespace semprune::cli {

inline constexpr const char* kToolVersion = "semprune 1.0.0";

struct CategoryConfig {
  std::string name;
  std::filesystem::path ratings;
  /// Optional word list (one per line); defaults to the words in `ratings`.
  std::optional<std::filesystem::path> words;
};

/// Everything a run depends on. Loaded from a JSON document whose relative
/// paths resolve against the document's directory; command-line flags
/// override individual fields.
struct RunConfig {
  std::filesystem::path embeddings;
  std::vector<CategoryConfig> categories;
  std::filesystem::path corpus;
  std::filesystem::path corpus_cache;
  std::size_t window = 2;
  std::size_t frequency_cutoff = 15000;
  double nonzero_threshold = 0.6;
  double alpha = 0.05;
  std::size_t probe_k = 60;
  std::size_t plsr_components = 30;
  std::filesystem::path binder_ratings;
  std::filesystem::path binder_areas;
  std::filesystem::path output_dir = "out";
  std::size_t workers = 1;
  bool cross_validate = true;
};

[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
/// Throws InvalidInput for out-of-range thresholds.
void validate(const RunConfig& config);

/// A pruning run for one category as persisted by `prune`.
struct SolutionFile {
  std::string category;
  std::vector<std::string> words;
  std::size_t n_features = 0;
  prune::PruneSolution solution;
  std::optional<prune::CrossValidation> cross_validation;
};

[[nodiscard]] std::string solution_to_json(const SolutionFile& file, const RunConfig& config);
[[nodiscard]] SolutionFile read_solution(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 success, 1 internal error, 2 user or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semprune::cli
