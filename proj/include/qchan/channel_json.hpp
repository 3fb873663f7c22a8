#pragma once

#include <string>

#include "json.hpp"
#include "qchan/channel.hpp"

namespace qchan {

// Reads a JSON number; decimal strings are accepted too.
double json_real(const nlohmann::json& v);

// Matrices serialize as [row][col] with each entry an [re, im] pair. Plain
// numbers (or decimal strings) are accepted on input for real entries.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

// Family descriptions: {"family": "<tag>", ...parameters}. Qutrit weights are
// written in the caller's original order so parsing reproduces the same spec.
nlohmann::json family_to_json(const FamilySpec& spec);
FamilySpec family_from_json(const nlohmann::json& j);

FamilySpec load_family(const std::string& path);
void save_family(const FamilySpec& spec, const std::string& path);

}  // namespace qchan
