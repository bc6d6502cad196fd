#pragma once

#include <string>
#include <vector>

#include "ampo/engine.hpp"

namespace ampo {

// 17-significant-digit decimal form; infinities print as "inf"/"-inf".
std::string format_double(double v);
double parse_double(const std::string& s);

// Per-run iterate diagnostics, one row per iteration:
// t,eta,value,gap,bregman_to_opt,eps_approx,c_v,nu,wall_ms
void write_run_csv(const std::string& path, const std::vector<IterationRecord>& records);

// Parses a CSV produced by write_run_csv back into numeric rows (header
// skipped).
std::vector<std::vector<double>> read_csv(const std::string& path);

}  // namespace ampo
