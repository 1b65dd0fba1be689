#ifndef RSCCA_CSV_IO_H_
#define RSCCA_CSV_IO_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "rscca/function_space.h"

namespace rscca {

// Numeric CSV with an optional header row and an optional leading text
// column. Numbers use '.' regardless of locale.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::string> ids;
  MatrixXd values;
};

// A header is detected when the first row contains a non-numeric field; an
// ID column when the first field of a data row is non-numeric.
CsvTable ParseCsv(std::istream& in);
CsvTable ReadCsv(const std::filesystem::path& path);

// One curve per row. A leading column is dropped as an ID when the row has
// one more field than the grid has points.
FunctionalSample LoadSample(const std::filesystem::path& path, const Grid& grid);

// Single-column CSV of grid abscissae.
Grid LoadGrid(const std::filesystem::path& path);

// Shortest representation that round-trips to the same double.
std::string FormatDouble(double value);

std::string FormatCsvRow(const std::vector<double>& row);

// Writes to a sibling temporary file, then renames over the target.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rscca

#endif  // RSCCA_CSV_IO_H_
