#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fastslow/classification.hpp"
#include "fastslow/config.hpp"
#include "fastslow/semantics.hpp"

namespace fastslow {

using Json = nlohmann::ordered_json;

Json lts_to_json(const Lts& lts);
Lts lts_from_json(const Json& j);

/// Edge labels are the action name, followed by "; entries" of the filtered
/// label when `cfg` is given and keeps any entry.
std::string lts_to_dot(const Lts& lts, const EquivConfig* cfg = nullptr);

using VectorRelation = std::vector<std::pair<State, State>>;

/// Reads `[[vecA, vecB], ...]`. The column form `[[vecA...], [vecB...]]` is
/// also accepted when vector lengths rule out the pair reading. Throws
/// Error(Relation) on malformed input.
VectorRelation relation_from_json(const Json& j);
Json relation_to_json(const VectorRelation& r);

Json classification_to_json(const VariableClassification& cls);

}  // namespace fastslow
