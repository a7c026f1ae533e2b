#pragma once

#include <string>
#include <vector>

namespace borelcalc {

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct CheckReport {
  std::vector<CheckRow> rows;

  void add(std::string name, double residual, double tolerance,
           std::string note = "") {
    rows.push_back({std::move(name), residual, tolerance,
                    residual <= tolerance, std::move(note)});
  }

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.residual);
    return m;
  }

  const CheckRow* find(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }
};

}  // namespace borelcalc
