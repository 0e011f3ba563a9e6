#pragma once

// Sibling-pair CSV: comma separated, header required, '.' decimal point.
// Required columns family_id,t1,t2,y1,y2; any cov_* columns are
// covariates; other columns are ignored.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spillover/estimator.hpp"

namespace spillover {

struct LoadedPairs {
  PairDataset data;
  /// Rows removed by complete-case deletion (a blank, "NA" or "." cell).
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;
};

/// Throws IoError, SchemaError (missing required column), ParseError
/// (non-numeric cell, with line and column) or EmptyDataError.
LoadedPairs read_pair_csv(std::istream& in, const std::string& source_name = "<stream>");
LoadedPairs load_pair_csv(const std::filesystem::path& path);

/// Values are written in shortest round-trip form, so reloading reproduces
/// every double exactly.
void write_pair_csv(const PairDataset& data, std::ostream& out);
void save_pair_csv(const PairDataset& data, const std::filesystem::path& path);

} // namespace spillover
