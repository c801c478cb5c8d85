#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "bw/models.hpp"

namespace bw {

/// Builds a model from `{"model": "gaussian"|"asym_laplace"|"nig", "params": {...}}`.
///
///   gaussian      sigma
///   asym_laplace  lambda_r, lambda_l
///   nig           alpha, beta, delta, optional mu (zero-mean when absent)
///
/// Throws ConfigError naming the field: malformed JSON (reason cites the
/// byte offset), missing or unknown keys, non-numeric values, and parameter
/// values the model rejects.
[[nodiscard]] ModelPtr model_from_json(std::string_view text);
[[nodiscard]] ModelPtr model_from_document(const nlohmann::json& doc);
[[nodiscard]] ModelPtr model_from_file(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json model_to_json(const Model& model);

}  // namespace bw
