#pragma once

#include "gamesmith/core/artifact.hpp"
#include "gamesmith/core/mechanics.hpp"

#include <json.hpp>

namespace gamesmith::core {

void to_json(nlohmann::json& j, const MechanicDescriptor& m);
void from_json(const nlohmann::json& j, MechanicDescriptor& m);

void to_json(nlohmann::json& j, const MechanicDelta& d);
void from_json(const nlohmann::json& j, MechanicDelta& d);

void to_json(nlohmann::json& j, const RecombineEntry& r);
void from_json(const nlohmann::json& j, RecombineEntry& r);

void to_json(nlohmann::json& j, const MechanicPlan& p);
void from_json(const nlohmann::json& j, MechanicPlan& p);

void to_json(nlohmann::json& j, const GameArtifact& a);
void from_json(const nlohmann::json& j, GameArtifact& a);

void to_json(nlohmann::json& j, const EvaluationReport& e);
void from_json(const nlohmann::json& j, EvaluationReport& e);

} // namespace gamesmith::core
