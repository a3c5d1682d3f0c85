#pragma once

#include <string>
#include <vector>

#include "softpred/core.hpp"

namespace softpred {

struct CsvOptions {
  std::string missing_token = "NA";
  bool has_header = false;            ///< skip (load) / emit (save) a header row
  std::vector<std::string> header;    ///< column names on save; x1..xn if empty
};

/// Parse a rectangular numeric CSV. Cells equal to the missing token (or
/// empty) are masked out. Ragged rows raise FormatError; a row with zero
/// observed entries raises ValidationError.
MaskedMatrix load_csv(const std::string& path, const CsvOptions& opts = {});

/// Write a MaskedMatrix back to CSV, masked cells as the missing token.
/// Values round-trip bit-exactly through load_csv.
void save_csv(const std::string& path, const MaskedMatrix& m, const CsvOptions& opts = {});

void save_csv(const std::string& path, const Matrix& m, const CsvOptions& opts = {});

}  // namespace softpred
