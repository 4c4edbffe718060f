#pragma once

// JSON model archives:
//
//   { "schema_version": 1,
//     "estimator_kind": "twoblock" | "pls2" | "pls1-set",
//     "payload": { ... } }
//
// Matrices are {"rows", "cols", "data"} with `data` row-major; doubles are
// written in shortest round-trip form so a reload is bitwise exact.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "stpls/pls.hpp"
#include "stpls/twoblock.hpp"

namespace stpls {

inline constexpr int kSchemaVersion = 1;

using AnyModel = std::variant<PlsModel, Pls1Set, TwoblockModel>;

std::string_view estimator_kind(const AnyModel& model);

/// Serializes to a JSON string (the archive body written by save_model).
std::string serialize_model(const AnyModel& model);
AnyModel deserialize_model(std::string_view text);

/// Writes via a temporary file and rename. Throws IoFailure.
void save_model(const AnyModel& model, const std::filesystem::path& path);
/// Throws IoFailure, SchemaMismatch or CorruptArchive.
AnyModel load_model(const std::filesystem::path& path);

DataMatrix predict(const AnyModel& model, const DataMatrix& x_new);
const std::vector<std::string>& predictor_names(const AnyModel& model);

}  // namespace stpls
