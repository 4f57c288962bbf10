#pragma once

#include "aqpt/bayes.hpp"
#include "aqpt/runner.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace aqpt {

using Json = nlohmann::ordered_json;

Json chi_to_json(const ChiMatrix& chi);
ChiMatrix chi_from_json(const Json& j);

Json trace_point_to_json(const TracePoint& pt);
TracePoint trace_point_from_json(const Json& j);

Json count_record_to_json(const CountRecord& rec);
CountRecord count_record_from_json(const Json& j);
std::string count_records_to_jsonl(const std::vector<LikelihoodBlock>& history);

std::string trace_to_jsonl(const std::vector<TracePoint>& trace);
std::vector<TracePoint> trace_from_jsonl(const std::string& text);

Json mean_trace_to_json_lines(const MeanTrace& mean);  // array of per-checkpoint objects

Json fit_to_json(const PowerLawFit& fit);

Json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const Json& j);
SweepConfig sweep_config_from_json(const Json& j);

Json ensemble_snapshot_to_json(const ParticleEnsemble& ens);

/// Writes via a temporary file in the same directory, then renames.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace aqpt
