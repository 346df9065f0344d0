#pragma once

#include "tvssl/binary.hpp"
#include "tvssl/multiclass.hpp"

#include <string>
#include <variant>

namespace tvssl {

using AnyModel = std::variant<BinaryModel, MulticlassModel>;

/// JSON document: variant, N, class count, bandwidth, hyperparameters,
/// expansion coefficients (one block per channel for multiclass models),
/// node values and the expansion index set. Floats round-trip exactly.
std::string model_to_json(const BinaryModel& m);
std::string model_to_json(const MulticlassModel& m);
AnyModel model_from_json(const std::string& text);

}  // namespace tvssl
