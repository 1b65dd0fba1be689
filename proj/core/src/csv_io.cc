#include "rscca/csv_io.h"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "rscca/error.h"

namespace rscca {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(Trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> ToDouble(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

CsvTable ParseCsv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  bool has_id = false;
  size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitFields(line);
    if (rows.empty() && table.header.empty()) {
      bool numeric = fields.size() > 1 || ToDouble(fields.front()).has_value();
      for (size_t i = 1; i < fields.size(); ++i) numeric = numeric && ToDouble(fields[i]).has_value();
      if (!numeric) {
        for (auto f : fields) table.header.emplace_back(f);
        continue;
      }
    }
    if (rows.empty()) {
      has_id = !ToDouble(fields.front()).has_value();
      width = fields.size() - (has_id ? 1 : 0);
    }
    if (fields.size() - (has_id ? 1 : 0) != width) {
      throw InputError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(width + (has_id ? 1 : 0)));
    }
    std::vector<double> row;
    row.reserve(width);
    for (size_t i = has_id ? 1 : 0; i < fields.size(); ++i) {
      const auto v = ToDouble(fields[i]);
      if (!v) {
        throw InputError("line " + std::to_string(line_no) + ": cannot parse '" +
                         std::string(fields[i]) + "'");
      }
      row.push_back(*v);
    }
    if (has_id) table.ids.emplace_back(fields.front());
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < width; ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return ParseCsv(in);
}

FunctionalSample LoadSample(const std::filesystem::path& path, const Grid& grid) {
  CsvTable table = ReadCsv(path);
  MatrixXd values = std::move(table.values);
  if (values.cols() == grid.size() + 1) {
    values = values.rightCols(grid.size()).eval();
  }
  if (values.cols() != grid.size()) {
    throw InputError("'" + path.string() + "' has " + std::to_string(values.cols()) +
                     " columns but the grid has " + std::to_string(grid.size()) + " points");
  }
  return FunctionalSample(grid, std::move(values));
}

Grid LoadGrid(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  if (table.values.cols() != 1) throw InputError("grid file must have a single column");
  return Grid(table.values.col(0));
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string FormatCsvRow(const std::vector<double>& row) {
  std::string out;
  for (size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ',';
    out += FormatDouble(row[i]);
  }
  return out;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw InputError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rscca
