#pragma once

#include "spcdrift/feature_model.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace spcdrift {

inline constexpr int kFormatVersion = 1;

nlohmann::ordered_json baseline_to_json(const BaselineProfile& baseline);
BaselineProfile baseline_from_json(const nlohmann::ordered_json& doc);

void save_baseline(const std::string& path, const BaselineProfile& baseline);
BaselineProfile load_baseline(const std::string& path);

}  // namespace spcdrift
