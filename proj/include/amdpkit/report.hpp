#pragma once

#include "amdpkit/algorithms.hpp"
#include "amdpkit/ergodicity.hpp"
#include "amdpkit/experiments.hpp"

#include <json.hpp>

namespace amdp {

nlohmann::json to_json(const Policy& policy);
nlohmann::json to_json(const ValueVector& v);
nlohmann::json to_json(const ErgodicityReport& report);
nlohmann::json to_json(const ReductionPlan& plan);
nlohmann::json to_json(const LearnedPolicy& learned);
nlohmann::json to_json(const RegressionResult& fit);

}  // namespace amdp
