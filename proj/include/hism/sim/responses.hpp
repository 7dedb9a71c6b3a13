#pragma once

#include <cstdint>
#include <span>

#include "hism/gaze/fixation.hpp"
#include "hism/gaze/types.hpp"
#include "hism/sim/events.hpp"
#include "hism/sim/session.hpp"

namespace hism::sim {

/// Scripted events (CS onsets/ends, highlight toggles, probes) plus simulated
/// keypresses and SAGAT answers derived from the gaze stream.
EventLog simulate_responses(const SessionScript& script, std::span<const gaze::GazeSample> samples,
                            std::uint64_t seed, const gaze::IdtParams& idt = {});

}  // namespace hism::sim
