#pragma once

#include <span>
#include <string>

#include "augrec/data/adjacency.hpp"
#include "augrec/data/feature_bank.hpp"
#include "augrec/model/model_state.hpp"
#include "augrec/train/objective.hpp"

namespace augrec {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t num_checked = 0;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-4;    // check_gradients_or_throw fails above this
  double abs_floor = 1e-6;    // denominators below this are treated as absolute error
};

// Compares the analytic gradient of the full objective (weight decay included)
// against central finite differences for every parameter entry. Relative error
// is |a - n| / max(|a|, |n|, abs_floor).
GradCheckReport check_gradients(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                                std::span<const Triplet> batch, const MaskSelection* mask,
                                const ObjectiveSettings& settings, const GradCheckOptions& options = {});

// Same, throwing an Error naming the worst parameter when above tolerance.
GradCheckReport check_gradients_or_throw(const ModelState& state, const FeatureBank& bank,
                                         const NormalizedAdjacency& adj, std::span<const Triplet> batch,
                                         const MaskSelection* mask, const ObjectiveSettings& settings,
                                         const GradCheckOptions& options = {});

}  // namespace augrec
