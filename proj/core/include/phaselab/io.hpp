#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "phaselab/phase_space.hpp"

namespace phaselab {

// Fixed-format number for CSV and text summaries ("%.12e", "inf", "nan").
std::string formatNumber(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(const std::string& v);
  void endRow();

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t pending_ = 0;
};

// Binary layout: text header lines "key value", terminated by "end\n", then
// little-endian (re, im) float64 pairs, row-major.
void writePhaseArray(const std::string& path, const PhaseArray& a, const Grid& grid);
PhaseArray readPhaseArray(const std::string& path);
void writeMatrix(const std::string& path, const CMatrix& m, const Grid& grid, double t,
                 const std::string& tag);
CMatrix readMatrix(const std::string& path);

}  // namespace phaselab
