#pragma once

#include "revpart/io.hpp"

#include <cstdint>

namespace revpart {

struct AnalyzeOptions {
  std::uint64_t seed = 1;
  int k_report_cap = 6;
  std::optional<double> eq_tol_override;
  int flat_pairs = 20;
  int cesaro_n = 200;
  int z_mean_n = 200;
};

// Full pipeline: validation, algebra suite, GNS suite, dynamics suite,
// assembled into the machine-readable report. Throws Error on validation
// rejection; the caller maps that to exit code 2.
Json analyze(const SystemSpec& spec, const AnalyzeOptions& opt = {});

}  // namespace revpart
