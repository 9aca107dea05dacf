#pragma once

#include "tamatrack/core.hpp"

namespace tamatrack {

/// Removes the oldest entry while the cue is over length or its oldest entry
/// is older than fps * beta_age frames. Remaining entries keep their order.
HistoricalAppearanceCue prune_cue(HistoricalAppearanceCue cue, int current_frame,
                                  const TrackerConfig& cfg);

/// Appends (c_rcnt, descriptor, frame, box) when c_rcnt exceeds tau_hist and
/// the gap since the newest entry is at least the rounded minimum interval,
/// then prunes. A rejected candidate leaves the cue unchanged.
HistoricalAppearanceCue maybe_add(HistoricalAppearanceCue cue, double c_rcnt,
                                  const AppearanceDescriptor& descriptor, int frame,
                                  const BoundingBox& box, const TrackerConfig& cfg);

}  // namespace tamatrack
