#pragma once

// JSON encodings for the value types that appear in event logs, session
// configs and API payloads.

#include <json.hpp>

#include "predmm/bmm.hpp"
#include "predmm/lmsr.hpp"
#include "predmm/market_maker.hpp"
#include "predmm/walk.hpp"

namespace predmm {

using json = nlohmann::json;

MarketMakerState market_maker_from_json(const json& j);
json market_maker_to_json(const MarketMakerState& mm);

}  // namespace predmm

namespace predmm::lmsr {
void to_json(nlohmann::json& j, const LmsrState& s);
void from_json(const nlohmann::json& j, LmsrState& s);
}  // namespace predmm::lmsr

namespace predmm::bmm {
void to_json(nlohmann::json& j, const BmmBelief& b);
void from_json(const nlohmann::json& j, BmmBelief& b);
void to_json(nlohmann::json& j, const RangeObservation& o);
void from_json(const nlohmann::json& j, RangeObservation& o);
void to_json(nlohmann::json& j, const BmmParams& p);
void from_json(const nlohmann::json& j, BmmParams& p);
void to_json(nlohmann::json& j, const BmmState& s);
void from_json(const nlohmann::json& j, BmmState& s);
}  // namespace predmm::bmm

namespace predmm::walk {
void to_json(nlohmann::json& j, const ShockChange& c);
void from_json(const nlohmann::json& j, ShockChange& c);
void to_json(nlohmann::json& j, const Shock& s);
void from_json(const nlohmann::json& j, Shock& s);
void to_json(nlohmann::json& j, const WalkConfig& c);
void from_json(const nlohmann::json& j, WalkConfig& c);
void to_json(nlohmann::json& j, const EdgeHits& h);
void from_json(const nlohmann::json& j, EdgeHits& h);
void to_json(nlohmann::json& j, const WalkState& s);
void from_json(const nlohmann::json& j, WalkState& s);
}  // namespace predmm::walk
