#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgsc/errors.hpp"

namespace tgsc {

// Per-link traffic over uniformly spaced intervals. Rows are links,
// columns intervals. Cells can be missing (mask), which later drops the
// temporal windows touching them.
struct LinkSeries {
  std::vector<std::string> link_names;
  std::size_t n_links = 0;
  std::size_t n_intervals = 0;
  double interval_seconds = 0.0;
  std::vector<double> values;      // row-major, n_links x n_intervals
  std::vector<std::uint8_t> missing;  // same layout, 1 = missing

  static LinkSeries zeros(std::vector<std::string> names, std::size_t intervals,
                          double interval_secs) {
    LinkSeries s;
    s.n_links = names.size();
    s.link_names = std::move(names);
    s.n_intervals = intervals;
    s.interval_seconds = interval_secs;
    s.values.assign(s.n_links * intervals, 0.0);
    s.missing.assign(s.n_links * intervals, 0);
    return s;
  }

  double& at(std::size_t link, std::size_t interval) {
    return values[link * n_intervals + interval];
  }
  double at(std::size_t link, std::size_t interval) const {
    return values[link * n_intervals + interval];
  }
  bool is_missing(std::size_t link, std::size_t interval) const {
    return missing[link * n_intervals + interval] != 0;
  }
  void mark_missing(std::size_t link, std::size_t interval) {
    missing[link * n_intervals + interval] = 1;
  }
};

// CSV format: UTF-8, first row = link names, one interval per row,
// fields comma-separated with no quoting, empty cell = missing value.
LinkSeries load_csv_series(const std::string& path, double interval_seconds = 300.0);
void save_csv_series(const LinkSeries& series, const std::string& path);

}  // namespace tgsc
