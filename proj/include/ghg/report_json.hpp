#pragma once

#include <json.hpp>

#include "ghg/classify.hpp"
#include "ghg/dynamics.hpp"
#include "ghg/hodge.hpp"

namespace ghg {

void to_json(nlohmann::json& j, const FieldResiduals& r);
void to_json(nlohmann::json& j, const DecompositionDiagnostics& d);
void to_json(nlohmann::json& j, const EnergyFractions& f);
void to_json(nlohmann::json& j, const ClassificationReport& r);
void to_json(nlohmann::json& j, const RecurrenceReport& r);
void to_json(nlohmann::json& j, const CriticalPoint& p);
void to_json(nlohmann::json& j, const CriticalSearch& s);
void to_json(nlohmann::json& j, const SpectrumRecord& r);

}  // namespace ghg
