#include "sphinpaint/coeff_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sphinpaint {

namespace {

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Splits a CSV line into exactly `n` fields; reports the line number on error.
std::vector<std::string> split_fields(const std::string& line, std::size_t n,
                                      const std::string& path, long line_no) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) fields.push_back(item);
  if (fields.size() != n)
    throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(n) +
                  " comma-separated fields, found " + std::to_string(fields.size()));
  return fields;
}

double parse_double(const std::string& s, const std::string& path, long line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ":" + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  }
}

long parse_int(const std::string& s, const std::string& path, long line_no) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ":" + std::to_string(line_no) + ": cannot parse integer '" + s + "'");
  }
}

}  // namespace

void write_coeffs_csv(const std::string& path, const CoefficientVector& coeffs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "l,m,re,im\n";
  for (int l = 0; l <= coeffs.band_limit(); ++l)
    for (int m = -l; m <= l; ++m) {
      const Complex v = coeffs.at(l, m);
      out << l << ',' << m << ',' << format17(v.real()) << ',' << format17(v.imag()) << '\n';
    }
  if (!out) throw IoError("write failure on '" + path + "'");
}

CoefficientVector read_coeffs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open coefficient file '" + path + "'");
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "l,m,re,im")
    throw IoError(path + ":1: expected header 'l,m,re,im'");

  std::vector<Complex> values;
  int expected_l = 0, expected_m = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, 4, path, line_no);
    const long l = parse_int(fields[0], path, line_no);
    const long m = parse_int(fields[1], path, line_no);
    if (l != expected_l || m != expected_m)
      throw IoError(path + ":" + std::to_string(line_no) + ": expected (l,m) = (" +
                    std::to_string(expected_l) + "," + std::to_string(expected_m) +
                    ") in degree-major order, found (" + std::to_string(l) + "," +
                    std::to_string(m) + ")");
    values.emplace_back(parse_double(fields[2], path, line_no),
                        parse_double(fields[3], path, line_no));
    if (expected_m == expected_l) {
      ++expected_l;
      expected_m = -expected_l;
    } else {
      ++expected_m;
    }
  }
  if (values.empty()) throw IoError(path + ": no coefficient rows");
  const int band_limit = expected_l - 1;
  if (expected_m != -expected_l)
    throw IoError(path + ": truncated file; degree " + std::to_string(expected_l) +
                  " is incomplete");
  CVec flat(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) flat(i) = values[i];
  return CoefficientVector(band_limit, std::move(flat));
}

void write_field_csv(const std::string& path, const CVec& field, const SphereGrid& grid) {
  if (field.size() != grid.n_nodes())
    throw ConfigError("field and grid node counts differ");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "theta,phi,re,im\n";
  for (int j = 0; j < grid.n_nodes(); ++j)
    out << format17(grid.theta(j)) << ',' << format17(grid.phi(j)) << ','
        << format17(field(j).real()) << ',' << format17(field(j).imag()) << '\n';
  if (!out) throw IoError("write failure on '" + path + "'");
}

FieldSamples read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field file '" + path + "'");
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "theta,phi,re,im")
    throw IoError(path + ":1: expected header 'theta,phi,re,im'");
  FieldSamples samples;
  std::vector<Complex> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line, 4, path, line_no);
    samples.thetas.push_back(parse_double(fields[0], path, line_no));
    samples.phis.push_back(parse_double(fields[1], path, line_no));
    values.emplace_back(parse_double(fields[2], path, line_no),
                        parse_double(fields[3], path, line_no));
  }
  if (values.empty()) throw IoError(path + ": no field rows");
  samples.values.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) samples.values(i) = values[i];
  return samples;
}

}  // namespace sphinpaint
