#pragma once

#include <string>

#include <json.hpp>

#include "conseq/natext.hpp"

namespace conseq {

inline constexpr const char* kReportSchema = "conseq-report/1";

/// Report skeleton shared by all CLI commands. Timing is attached only on
/// request so that identical inputs produce byte-identical documents.
nlohmann::json report_header(const std::string& command);

nlohmann::json verdict_to_json(const Verdict& v, const LogicPresentation& l);
nlohmann::json derivation_to_json(const Derivation& d, const LogicPresentation& l);

// --- witness files ----------------------------------------------------------

std::string format_witness(const WitnessRecord& w);
WitnessRecord parse_witness(const std::string& text);
WitnessRecord load_witness(const std::string& path);
void save_witness(const WitnessRecord& w, const std::string& path);

}  // namespace conseq
