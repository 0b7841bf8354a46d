#pragma once

#include <string>

#include "ects/gamma.hpp"

namespace ects {

// Versioned plain-text model format. Floats are written round-trip-exactly,
// so a load/save round trip is byte-identical and predictions are bit-equal.
// Loading rejects unknown magic/version and structurally broken files with
// std::runtime_error.
void save_model(const GammaModel& model, const std::string& path);
GammaModel load_model(const std::string& path);

}  // namespace ects
