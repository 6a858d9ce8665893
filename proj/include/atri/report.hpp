#pragma once

#include <string>
#include <vector>

#include "atri/bench.hpp"

namespace atri {

// Plain-text table in the column order Acc, Ma-P, Ma-R, Ma-F, CS followed by
// prediction counts. With `compare` present the two reports render side by
// side. Rendering is deterministic.
std::string render_report_text(const BenchReport& report,
                               const BenchReport* compare = nullptr);

// method,acc,ma_p,ma_r,ma_f,cs,n_yes,n_no,n_invalid
std::string render_report_csv(const BenchReport& report);

}  // namespace atri
