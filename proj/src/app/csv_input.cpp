#include "mfrail/app/csv_input.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mfrail::app {

InputError::InputError(const std::string& message, std::vector<std::string> diagnostics)
    : DataError(message), diagnostics_(std::move(diagnostics)) {}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "NaN"; }

std::optional<double> parse_real(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(x)) return std::nullopt;
    return x;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

LoadedData load_csv(std::istream& in, const ColumnSpec& columns) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("input is empty", {"line 1: missing header"});
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  std::map<std::string, std::size_t> col;
  for (std::size_t c = 0; c < header.size(); ++c) col.emplace(header[c], c);

  std::vector<std::string> diags;
  auto require = [&](const std::string& name) -> std::size_t {
    const auto it = col.find(name);
    if (it == col.end()) {
      diags.push_back("line 1: missing column '" + name + "'");
      return 0;
    }
    return it->second;
  };
  const std::size_t c_cluster = require(columns.cluster);
  const std::size_t c_time = require(columns.time);
  const std::size_t c_event = require(columns.event);
  std::vector<std::size_t> c_cov;
  for (const auto& name : columns.covariates) c_cov.push_back(require(name));
  std::optional<std::size_t> c_member;
  if (columns.member_index) {
    c_member = require(*columns.member_index);
  } else if (const auto it = col.find("member_index"); it != col.end()) {
    c_member = it->second;
  }
  std::vector<std::pair<std::size_t, std::string>> filters;
  for (const auto& [name, value] : columns.where) filters.emplace_back(require(name), value);
  if (columns.covariates.empty()) diags.push_back("no covariate columns selected");
  if (!diags.empty()) throw InputError("invalid header", diags);

  std::vector<std::string> cluster_ids;
  std::size_t n_rows = 0, n_kept = 0;
  std::vector<Cluster> clusters;
  std::map<std::string, std::size_t> cluster_pos;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++n_rows;
    std::vector<std::string> f = split_csv_line(line);
    for (auto& x : f) x = trim(x);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (f.size() != header.size()) {
      diags.push_back(where + "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
      continue;
    }
    bool keep = true;
    for (const auto& [c, value] : filters) keep = keep && f[c] == value;
    if (!keep) continue;
    ++n_kept;

    bool row_ok = true;
    auto bad = [&](const std::string& msg) {
      diags.push_back(where + msg);
      row_ok = false;
    };
    if (is_missing(f[c_cluster])) bad("missing cluster id");
    Observation obs;
    if (is_missing(f[c_time])) {
      bad("missing time");
    } else if (const auto t = parse_real(f[c_time]); !t) {
      bad("time is not a number: '" + f[c_time] + "'");
    } else if (*t < 0.0) {
      bad("time must be nonnegative, got " + f[c_time]);
    } else {
      obs.time = *t;
    }
    if (f[c_event] == "0" || f[c_event] == "1") {
      obs.event = f[c_event] == "1" ? 1 : 0;
    } else {
      bad("event must be 0 or 1, got '" + f[c_event] + "'");
    }
    obs.covariates.resize(static_cast<Eigen::Index>(c_cov.size()));
    for (std::size_t k = 0; k < c_cov.size(); ++k) {
      const std::string& s = f[c_cov[k]];
      const auto x = is_missing(s) ? std::nullopt : parse_real(s);
      if (!x) {
        bad("covariate '" + columns.covariates[k] + "' is missing or not a finite number: '" + s +
            "'");
      } else {
        obs.covariates(static_cast<Eigen::Index>(k)) = *x;
      }
    }
    std::optional<int> member;
    if (c_member) {
      const auto m = parse_real(f[*c_member]);
      if (!m || *m < 0 || *m != std::floor(*m)) {
        bad("member_index must be a nonnegative integer, got '" + f[*c_member] + "'");
      } else {
        member = static_cast<int>(*m);
      }
    }
    if (!row_ok) continue;

    auto [it, inserted] = cluster_pos.emplace(f[c_cluster], clusters.size());
    if (inserted) {
      clusters.emplace_back();
      clusters.back().id = f[c_cluster];
      cluster_ids.push_back(f[c_cluster]);
    }
    Cluster& cl = clusters[it->second];
    obs.member_index = member ? *member : static_cast<int>(cl.members.size());
    cl.members.push_back(std::move(obs));
  }
  if (!diags.empty()) {
    std::ostringstream msg;
    msg << diags.size() << " invalid row(s)";
    throw InputError(msg.str(), diags);
  }
  if (clusters.empty()) throw InputError("no data rows", {"no rows left after filtering"});
  return LoadedData{Dataset::make(std::move(clusters)), columns.covariates,
                    std::move(cluster_ids), n_rows, n_kept};
}

LoadedData load_csv_file(const std::string& path, const ColumnSpec& columns) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'", {"cannot open '" + path + "'"});
  return load_csv(in, columns);
}

}  // namespace mfrail::app
