#pragma once

#include <json.hpp>

#include "longtie/fitting.hpp"
#include "longtie/formation_model.hpp"
#include "longtie/synth.hpp"
#include "longtie/temporal_graph.hpp"

namespace longtie {

// Missing keys keep their defaults; unknown keys are rejected.
void to_json(nlohmann::json& j, const PhaseConfig& c);
void from_json(const nlohmann::json& j, PhaseConfig& c);
void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const FitConfig& c);
void from_json(const nlohmann::json& j, FitConfig& c);
/// Graph and endowment settings only; model, window and seed are configured separately.
void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);

/// 64-bit FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace longtie
