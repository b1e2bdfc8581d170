#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "driftlab/norms.hpp"
#include "driftlab/solver.hpp"
#include "driftlab/truncation.hpp"
#include "driftlab/zhikov.hpp"

namespace driftlab {

inline constexpr const char* kReportSchema = "driftlab-report/1";

/// Finite numbers stay numbers; inf and nan become "inf", "-inf", "nan".
nlohmann::json json_number(double v);

/// Everything except the solution field itself.
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const NormReport& report);
nlohmann::json to_json(const CaccioppoliTable& table);
nlohmann::json to_json(const ZhikovLevel& level);
nlohmann::json to_json(const ZhikovReport& report);

/// Two-space indented dump with a trailing newline.
std::string dump_json(const nlohmann::json& j);

/// Fixed-column text table: criterion, value, verdict.
std::string norms_table(const NormReport& report);

}  // namespace driftlab
