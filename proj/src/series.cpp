#include "tgsc/series.hpp"

#include <fstream>
#include <sstream>

#include "tgsc/io_util.hpp"

namespace tgsc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

LinkSeries load_csv_series(const std::string& path, double interval_seconds) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header row");
  auto names = split_fields(strip_cr(line));
  if (names.empty() || (names.size() == 1 && names[0].empty())) {
    throw ParseError(path + ": header row has no link names");
  }

  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;  // tolerate a trailing newline
    auto fields = split_fields(line);
    if (fields.size() != names.size()) {
      throw ParseError(path + ": row " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(names.size()));
    }
    rows.push_back(std::move(fields));
  }

  LinkSeries s = LinkSeries::zeros(std::move(names), rows.size(), interval_seconds);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t l = 0; l < s.n_links; ++l) {
      const std::string& field = rows[t][l];
      if (field.empty()) {
        s.mark_missing(l, t);
      } else {
        s.at(l, t) = parse_double(field, path + " row " + std::to_string(t + 2) + " column " +
                                             std::to_string(l + 1));
      }
    }
  }
  return s;
}

void save_csv_series(const LinkSeries& series, const std::string& path) {
  std::string out;
  for (std::size_t l = 0; l < series.n_links; ++l) {
    if (series.link_names[l].find(',') != std::string::npos) {
      throw ValidationError("link name contains a comma: " + series.link_names[l]);
    }
    if (l) out += ',';
    out += series.link_names[l];
  }
  out += '\n';
  for (std::size_t t = 0; t < series.n_intervals; ++t) {
    for (std::size_t l = 0; l < series.n_links; ++l) {
      if (l) out += ',';
      if (!series.is_missing(l, t)) out += format_double(series.at(l, t));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace tgsc
