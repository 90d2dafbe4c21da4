#include "augrec/train/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace augrec {

GradCheckReport check_gradients(const ModelState& state, const FeatureBank& bank, const NormalizedAdjacency& adj,
                                std::span<const Triplet> batch, const MaskSelection* mask,
                                const ObjectiveSettings& settings, const GradCheckOptions& options) {
  ModelState grad;
  evaluate_objective(state, bank, adj, batch, mask, settings, &grad, true);

  ModelState probe = state;
  auto probe_params = probe.parameters();
  const auto grads = grad.parameters();
  GradCheckReport report;
  report.max_relative_error = -1.0;
  for (std::size_t p = 0; p < probe_params.size(); ++p) {
    for (std::size_t i = 0; i < probe_params[p].size; ++i) {
      double& x = probe_params[p].data[i];
      const double saved = x;
      x = saved + options.epsilon;
      const double up = evaluate_objective(probe, bank, adj, batch, mask, settings, nullptr, true).total;
      x = saved - options.epsilon;
      const double down = evaluate_objective(probe, bank, adj, batch, mask, settings, nullptr, true).total;
      x = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double analytic = grads[p].data[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), options.abs_floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++report.num_checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = probe_params[p].name;
        report.worst_index = i;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  }
  report.max_relative_error = std::max(report.max_relative_error, 0.0);
  return report;
}

GradCheckReport check_gradients_or_throw(const ModelState& state, const FeatureBank& bank,
                                         const NormalizedAdjacency& adj, std::span<const Triplet> batch,
                                         const MaskSelection* mask, const ObjectiveSettings& settings,
                                         const GradCheckOptions& options) {
  const GradCheckReport report = check_gradients(state, bank, adj, batch, mask, settings, options);
  if (report.max_relative_error > options.tolerance) {
    std::ostringstream msg;
    msg << "gradient check failed: relative error " << report.max_relative_error << " at "
        << report.worst_parameter << "[" << report.worst_index << "] (analytic " << report.worst_analytic
        << ", numeric " << report.worst_numeric << ")";
    throw Error(msg.str());
  }
  return report;
}

}  // namespace augrec
