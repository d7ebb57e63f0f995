#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace semprune::io {

using Row = std::vector<std::string>;

/// Reads a tab- or comma-separated file (delimiter taken from the first
/// nonempty line). Blank lines are skipped, surrounding quotes stripped.
[[nodiscard]] std::vector<Row> read_delimited(const std::filesystem::path& path);

[[nodiscard]] bool parse_double(std::string_view text, double& out);

/// Shortest decimal text that round-trips to the same double.
[[nodiscard]] std::string format_double(double v);

/// Comma-separated text with a header row; fields containing commas or quotes
/// are quoted.
[[nodiscard]] std::string to_csv(const Row& header, const std::vector<Row>& rows);

void write_file(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace semprune::io
