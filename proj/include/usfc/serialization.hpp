#pragma once

#include "usfc/de_learner.hpp"
#include "usfc/experiments.hpp"
#include "usfc/fidelity.hpp"
#include "usfc/nbit_strategy.hpp"

#include <json.hpp>

#include <string>

namespace usfc {

using Json = nlohmann::ordered_json;

/// {"n_bits": N, "rows": {"x-bitstring": [Pr(y=0), Pr(y=1)]}}
Json task_to_json(const TaskSpec& task);
TaskSpec task_from_json(const Json& j);

/// {"n_bits": N, "blocks": {"j-bitstring": {"p0", "p1", "delta", "delta_policy"}}}
Json bank_to_json(const MemoryBank& bank);
MemoryBank bank_from_json(const Json& j);

Json record_to_json(const TrialRecord& rec);
TrialRecord record_from_json(const Json& j);

/// One JSON document per line, LF terminated.
std::string records_to_jsonl(const std::vector<TrialRecord>& records);

Json learner_to_json(const DEConfig& config);
/// Fills fields present in `j` over `base`; unknown keys are rejected.
DEConfig learner_from_json(const Json& j, DEConfig base = {});

Json delta_to_json(const DeltaPolicy& delta);
DeltaPolicy delta_from_json(const Json& j);

/// Fixed 17-significant-digit rendering used in every CSV file.
std::string format_double(double v);

}  // namespace usfc
