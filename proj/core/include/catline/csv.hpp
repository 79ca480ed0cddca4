#pragma once

#include <string>
#include <vector>

namespace catline {

// Rectangular numeric table. Serialized form: one leading '#' comment line
// documenting the column units, the header row, then the data rows; every
// value at 17 significant digits, lines ending in a single '\n'.
struct CsvSeries {
  std::string unit_comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void append(std::vector<double> row);  // rejects a width mismatch
  std::string to_text() const;
};

std::string format_g17(double x);

// Writes through a temporary in the same directory and renames it into
// place, so a reader never sees a partial file; nothing is left behind on
// failure.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace catline
