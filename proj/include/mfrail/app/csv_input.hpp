#pragma once

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfrail/data.hpp"
#include "mfrail/error.hpp"

namespace mfrail::app {

// Schema violation in an input file. `diagnostics` holds one line per
// offending row ("line 7: event must be 0 or 1, got '2'").
class InputError : public DataError {
 public:
  InputError(const std::string& message, std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct ColumnSpec {
  std::string cluster = "cluster";
  std::string time = "time";
  std::string event = "event";
  std::vector<std::string> covariates;
  // Defaults to a "member_index" column when present, else row order
  // within the cluster.
  std::optional<std::string> member_index;
  // Keep only rows whose column equals the given text.
  std::vector<std::pair<std::string, std::string>> where;
};

struct LoadedData {
  Dataset data;
  std::vector<std::string> covariate_names;
  std::vector<std::string> cluster_ids;  // first-appearance order
  std::size_t n_rows = 0;                // data rows read
  std::size_t n_kept = 0;                // rows after `where` filters
};

// Splits one CSV record. Double-quoted fields may contain commas and ""
// escapes; embedded newlines are not supported.
std::vector<std::string> split_csv_line(const std::string& line);

// Throws InputError listing every offending row, and DataError when the
// rows do not form a valid dataset (for example no events).
LoadedData load_csv(std::istream& in, const ColumnSpec& columns);
LoadedData load_csv_file(const std::string& path, const ColumnSpec& columns);

}  // namespace mfrail::app
