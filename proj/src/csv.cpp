#include "softpred/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "softpred/errors.hpp"

namespace softpred {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ofstream& out, const CsvOptions& opts, Index cols) {
  if (!opts.has_header) return;
  for (Index j = 0; j < cols; ++j) {
    if (j) out << ',';
    if (j < static_cast<Index>(opts.header.size())) {
      out << opts.header[static_cast<std::size_t>(j)];
    } else {
      out << 'x' << (j + 1);
    }
  }
  out << '\n';
}

}  // namespace

MaskedMatrix load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> observed;
  std::string line;
  std::size_t lineno = 0;
  bool skipped_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (opts.has_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    auto fields = split_fields(line);
    std::vector<double> row;
    std::vector<bool> obs;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      if (f.empty() || f == opts.missing_token) {
        row.push_back(0.0);
        obs.push_back(false);
        continue;
      }
      errno = 0;
      char* end = nullptr;
      double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0' || errno == ERANGE) {
        throw FormatError(path + ":" + std::to_string(lineno) + ": cannot parse '" + f + "'");
      }
      row.push_back(v);
      obs.push_back(true);
    }
    if (!values.empty() && row.size() != values.front().size()) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                        std::to_string(row.size()) + " fields, expected " +
                        std::to_string(values.front().size()) + ")");
    }
    values.push_back(std::move(row));
    observed.push_back(std::move(obs));
  }
  if (values.empty()) throw FormatError(path + ": no data rows");

  const Index m = static_cast<Index>(values.size());
  const Index n = static_cast<Index>(values.front().size());
  Matrix data(m, n);
  Mask mask(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      data(i, j) = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      mask(i, j) = observed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  MaskedMatrix out(std::move(data), std::move(mask));
  out.require_observed_rows();
  return out;
}

void save_csv(const std::string& path, const MaskedMatrix& m, const CsvOptions& opts) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_header(out, opts, m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      if (m.mask(i, j)) {
        out << format_value(m.data(i, j));
      } else {
        out << opts.missing_token;
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void save_csv(const std::string& path, const Matrix& m, const CsvOptions& opts) {
  save_csv(path, MaskedMatrix::fully_observed(m), opts);
}

}  // namespace softpred
