#pragma once

#include <functional>
#include <iosfwd>

#include "wbb/netsim/config.hpp"
#include "wbb/netsim/metrics.hpp"

namespace wbb::netsim {

/// Deterministic discrete-event execution of one scenario. The full event
/// trace and every metric are pure functions of the config (seed included).
/// `trace` receives one newline-terminated record per simulator event when
/// set.
RunResult run(const ScenarioConfig& cfg, std::ostream* trace = nullptr);

}  // namespace wbb::netsim
