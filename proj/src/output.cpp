#include "winstat/output.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace winstat {

namespace {

std::string printf_string(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  // Guard against locales that use ',' as the decimal separator.
  for (char& c : buf) {
    if (c == ',') c = '.';
  }
  return std::string(buf);
}

bool looks_numeric(const std::string& cell) {
  if (cell.empty()) return false;
  const char c = cell.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
         c == '.';
}

std::vector<std::size_t> column_widths(const OutputTable& table) {
  std::vector<std::size_t> widths(table.columns.size(), 0);
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    widths[j] = table.columns[j].size();
  }
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size() && j < widths.size(); ++j) {
      widths[j] = std::max(widths[j], row[j].size());
    }
  }
  return widths;
}

std::string pad(const std::string& cell, std::size_t width, bool right_align) {
  if (cell.size() >= width) return cell;
  const std::string fill(width - cell.size(), ' ');
  return right_align ? fill + cell : cell + fill;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "";
  char fmt[16];
  std::snprintf(fmt, sizeof(fmt), "%%.%df", decimals);
  return printf_string(fmt, value);
}

std::string format_integer(long value) { return std::to_string(value); }

std::string format_general(double value) {
  if (std::isnan(value)) return "";
  return printf_string("%.10g", value);
}

std::string render_csv(const OutputTable& table) {
  std::string out;
  for (const auto& line : table.meta) {
    out += "# ";
    out += line;
    out += '\n';
  }
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j > 0) out += ',';
    out += table.columns[j];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

std::string render_markdown(const OutputTable& table) {
  std::string out;
  for (const auto& line : table.meta) {
    out += line;
    out += "\n\n";
  }
  const auto widths = column_widths(table);
  out += '|';
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    out += ' ';
    out += pad(table.columns[j], widths[j], false);
    out += " |";
  }
  out += '\n';
  out += '|';
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    out += ' ';
    out += std::string(widths[j], '-');
    out += " |";
  }
  out += '\n';
  for (const auto& row : table.rows) {
    out += '|';
    for (std::size_t j = 0; j < row.size(); ++j) {
      out += ' ';
      out += pad(row[j], widths[j], looks_numeric(row[j]));
      out += " |";
    }
    out += '\n';
  }
  return out;
}

std::string render_text(const OutputTable& table) {
  std::string out;
  for (const auto& line : table.meta) {
    out += line;
    out += '\n';
  }
  if (!table.meta.empty()) out += '\n';
  const auto widths = column_widths(table);
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j > 0) out += "  ";
    out += pad(table.columns[j], widths[j], j > 0);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += "  ";
      out += pad(row[j], widths[j], j > 0);
    }
    out += '\n';
  }
  return out;
}

std::string render(const OutputTable& table, const std::string& format) {
  if (format == "csv") return render_csv(table);
  if (format == "md") return render_markdown(table);
  if (format == "txt") return render_text(table);
  throw std::invalid_argument("unknown output format: " + format);
}

void write_output(const OutputTable& table, const std::string& format,
                  const std::string& path) {
  const std::string body = render(table, format);
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  file << body;
  if (!file) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

}  // namespace winstat
