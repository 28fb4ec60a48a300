#pragma once

#include "survpls/data.hpp"
#include "survpls/step_function.hpp"

namespace survpls {

enum class KmOrientation {
  Event,      // survival curve S(t) of the event process
  Censoring,  // censoring-distribution curve G(t), built from (t_i, 1 - d_i)
};

/// Kaplan-Meier product-limit estimator. S(0) = 1; the curve steps only at
/// times where the (possibly flipped) event count is positive.
StepFunction km_estimator(const SurvivalDataset& data, KmOrientation orientation);

}  // namespace survpls
