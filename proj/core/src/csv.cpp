#include "ampo/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ampo/errors.hpp"

namespace ampo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("bad numeric field: " + s);
  }
  if (pos != s.size()) throw InputError("bad numeric field: " + s);
  return v;
}

void write_run_csv(const std::string& path, const std::vector<IterationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << "t,eta,value,gap,bregman_to_opt,eps_approx,c_v,nu,wall_ms\n";
  for (const IterationRecord& r : records) {
    out << r.t << ',' << format_double(r.eta) << ',' << format_double(r.value) << ','
        << format_double(r.gap) << ',' << format_double(r.bregman_to_opt) << ','
        << format_double(r.eps_approx) << ',' << format_double(r.c_v) << ','
        << format_double(r.nu) << ',' << format_double(r.wall_ms) << '\n';
  }
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_double(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ampo
