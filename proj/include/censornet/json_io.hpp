#pragma once

// JSON encodings of the domain types. Decoders throw InputError on shape or
// invariant violations.

#include <json.hpp>

#include "censornet/circumvention.hpp"
#include "censornet/dns_audit.hpp"
#include "censornet/model.hpp"
#include "censornet/sampling.hpp"

namespace censornet::json_io {

using nlohmann::json;

json encode(const UrlRecord& record);
json encode(const ProbeResult& result);
json encode(const CensusTable& census);
json encode(const StratumPlan& plan);
json encode(const sampling::SamplingParams& params);
json encode(const sampling::SampleSizeResult& size);
json encode(const SuccessTable& table);
json encode(const DnsObservation& observation);
json encode(const DnsVerdict& verdict);

UrlRecord decode_url_record(const json& j);
ProbeResult decode_probe_result(const json& j);
CensusTable decode_census(const json& j);
StratumPlan decode_stratum_plan(const json& j);
sampling::SamplingParams decode_sampling_params(const json& j);
sampling::SampleSizeResult decode_sample_size(const json& j);
SuccessTable decode_success_table(const json& j);
DnsObservation decode_observation(const json& j);
DnsVerdict decode_verdict(const json& j);

}  // namespace censornet::json_io
