#pragma once

#include <string>
#include <vector>

namespace winstat {

// Small table abstraction shared by the CLI subcommands: free-form metadata
// lines, column names, and rows of preformatted cells.
struct OutputTable {
  std::vector<std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Fixed-point formatting with '.' as the decimal separator regardless of
// locale.  NaN renders as an empty cell.
std::string format_fixed(double value, int decimals);
std::string format_integer(long value);
// Compact formatting for metadata values (no trailing zeros).
std::string format_general(double value);

std::string render_csv(const OutputTable& table);
std::string render_markdown(const OutputTable& table);
std::string render_text(const OutputTable& table);

// format must be one of "csv", "md", "txt"; throws std::invalid_argument
// otherwise.
std::string render(const OutputTable& table, const std::string& format);

// Writes the rendered table to the given path, or to stdout when the path is
// "-" or empty.  Throws std::runtime_error when the file cannot be opened.
void write_output(const OutputTable& table, const std::string& format,
                  const std::string& path);

}  // namespace winstat
