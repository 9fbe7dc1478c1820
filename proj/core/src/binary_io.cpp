#include "phaselab/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace phaselab {
namespace {

static_assert(std::endian::native == std::endian::little, "binary layout assumes little-endian");

void writePayload(std::ofstream& out, const CMatrix& m) {
  std::vector<double> buf;
  buf.reserve(2 * m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      buf.push_back(m(r, c).real());
      buf.push_back(m(r, c).imag());
    }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
}

std::map<std::string, std::string> readHeader(std::ifstream& in, const std::string& path) {
  std::map<std::string, std::string> h;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "end") return h;
    auto sp = line.find(' ');
    if (sp == std::string::npos) throw std::runtime_error("malformed header in " + path);
    h[line.substr(0, sp)] = line.substr(sp + 1);
  }
  throw std::runtime_error("missing header terminator in " + path);
}

CMatrix readPayload(std::ifstream& in, long rows, long cols, const std::string& path) {
  std::vector<double> buf(2 * rows * cols);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated payload in " + path);
  CMatrix m(rows, cols);
  std::size_t i = 0;
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c, i += 2) m(r, c) = Complex(buf[i], buf[i + 1]);
  return m;
}

RVector parseAxis(const std::string& s) {
  std::istringstream is(s);
  std::vector<double> v;
  double x;
  while (is >> x) v.push_back(x);
  return Eigen::Map<RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string joinAxis(const RVector& a) {
  std::string s;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (i) s += ' ';
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a[i]);
    s += buf;
  }
  return s;
}

}  // namespace

std::string formatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v == 0.0 ? 0.0 : v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(formatNumber(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (pending_ >= columns_) throw std::logic_error("too many CSV cells in row");
  os_ << (pending_ ? "," : "") << v;
  ++pending_;
  return *this;
}

void CsvWriter::endRow() {
  if (pending_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
  os_ << '\n';
  pending_ = 0;
}

void writePhaseArray(const std::string& path, const PhaseArray& a, const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "kind phase_array\n"
      << "d " << grid.dimension() << "\n"
      << "N " << grid.pointsPerAxis() << "\n"
      << "L " << formatNumber(grid.halfExtent()) << "\n"
      << "dx " << formatNumber(a.lattice.dx()) << "\n"
      << "dxi " << formatNumber(a.lattice.dxi()) << "\n"
      << "x_axis " << joinAxis(a.lattice.xAxis()) << "\n"
      << "xi_axis " << joinAxis(a.lattice.xiAxis()) << "\n"
      << "rows " << a.values.rows() << "\n"
      << "cols " << a.values.cols() << "\n"
      << "end\n";
  writePayload(out, a.values);
}

PhaseArray readPhaseArray(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto h = readHeader(in, path);
  if (h["kind"] != "phase_array") throw std::runtime_error(path + " is not a phase array");
  PhaseLattice lat(std::stoi(h.at("d")), parseAxis(h.at("x_axis")), parseAxis(h.at("xi_axis")));
  CMatrix v = readPayload(in, std::stol(h.at("rows")), std::stol(h.at("cols")), path);
  return PhaseArray{lat, v};
}

void writeMatrix(const std::string& path, const CMatrix& m, const Grid& grid, double t,
                 const std::string& tag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "kind matrix\n"
      << "d " << grid.dimension() << "\n"
      << "N " << grid.pointsPerAxis() << "\n"
      << "L " << formatNumber(grid.halfExtent()) << "\n"
      << "t " << formatNumber(t) << "\n"
      << "tag " << tag << "\n"
      << "rows " << m.rows() << "\n"
      << "cols " << m.cols() << "\n"
      << "end\n";
  writePayload(out, m);
}

CMatrix readMatrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto h = readHeader(in, path);
  if (h["kind"] != "matrix") throw std::runtime_error(path + " is not a matrix file");
  return readPayload(in, std::stol(h.at("rows")), std::stol(h.at("cols")), path);
}

}  // namespace phaselab
