#pragma once

#include <json.hpp>
#include <string>

#include "gjsq/core_model.hpp"
#include "gjsq/ctmc.hpp"
#include "gjsq/des.hpp"
#include "gjsq/rate_profile.hpp"
#include "gjsq/sqa.hpp"

namespace gjsq {

using json = nlohmann::json;

// SystemConfig <-> JSON. Keys: rates (array), lambda (number), jobsize
// (object), tie_prob (optional array). Jobsize accepts {"name": "exp"}
// (canonical Table-1 parameters) or explicit parameters, e.g.
// {"name": "weibull", "shape": k, "scale": c}.
json to_json(const SystemConfig& config);
SystemConfig config_from_json(const json& j);
SystemConfig load_config_file(const std::string& path);

json to_json(const JobSize& dist);
JobSize jobsize_from_json(const json& j);

json to_json(const RateProfile& profile);

// SQA result: {"s":..,"rho":..,"warnings":[..],"server1":{"rates":[..],
// "pi":[..],"mean":..,"std":..,"lambda_bar":..},"server2":{..}}
json to_json(const SqaResult& result);

// Summary blocks share the metric layout {mean, std, lambda_bar} per server
// so `gjsq compare` can diff any two engine outputs.
json summary_json(const SqaResult& result);
json summary_json(const StationaryResult& dist, const SystemConfig& config);
json summary_json(const ReplicatedResult& reps, const SystemConfig& config);

// CSV writers; numbers are shortest round-trip representations.
// Rate profiles / queue distributions: columns server,n,value,stderr.
std::string rates_csv(const std::vector<RateProfile>& profiles);
std::string queue_csv(const std::vector<Eigen::VectorXd>& dists);
// Joint law: columns q1,q2,prob (row-major, probabilities > floor).
std::string joint_csv(const Eigen::MatrixXd& pi, double floor = 0.0);

std::string format_double(double x);  // shortest round-trip decimal

}  // namespace gjsq
