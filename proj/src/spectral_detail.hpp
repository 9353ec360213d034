#pragma once

#include <mutex>
#include <span>
#include <vector>

#include "fwdiss/core.hpp"

namespace fwdiss::detail {

/// FFTW's planner is not reentrant; every plan create/destroy holds this.
std::mutex& fftw_planner_mutex();

/// Complex samples synthesized from a centred full spectrum.
std::vector<cplx> complex_inverse(const Grid& grid, std::span<const cplx> centred);

}  // namespace fwdiss::detail
