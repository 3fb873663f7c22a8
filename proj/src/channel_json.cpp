#include "qchan/channel_json.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "qchan/errors.hpp"

namespace qchan {

using nlohmann::json;

double json_real(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = v.get<std::string>();
      const double parsed = std::stod(s, &used);
      if (used == s.size()) return parsed;
    } catch (const std::exception&) {
    }
    throw ConfigInvalid("cannot parse number: " + v.dump());
  }
  throw ConfigInvalid("expected a number, got: " + v.dump());
}

namespace {

double to_real(const json& v) { return json_real(v); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigInvalid(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double real_field(const json& j, const char* key) { return to_real(field(j, key)); }

std::size_t size_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned() && !v.is_number_integer())
    throw ConfigInvalid(std::string("field \"") + key + "\" must be a non-negative integer");
  const auto n = v.get<long long>();
  if (n < 0) throw ConfigInvalid(std::string("field \"") + key + "\" must be non-negative");
  return static_cast<std::size_t>(n);
}

std::vector<double> real_vector(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigInvalid(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(to_real(e));
  return out;
}

cplx entry_from_json(const json& v) {
  if (v.is_array()) {
    if (v.size() != 2) throw ConfigInvalid("matrix entry must be an [re, im] pair");
    return {to_real(v[0]), to_real(v[1])};
  }
  return {to_real(v), 0.0};
}

std::vector<ComplexMatrix> matrix_list(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigInvalid(std::string(what) + " must be an array of matrices");
  std::vector<ComplexMatrix> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(matrix_from_json(e));
  return out;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigInvalid("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ConfigInvalid("matrix rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ConfigInvalid("matrix rows must share one length");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = entry_from_json(j[i][c]);
  }
  return m;
}

json family_to_json(const FamilySpec& spec) {
  json j;
  j["family"] = family_tag(spec);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DepolarizingSpec>) {
          j["d"] = s.d;
          j["a"] = s.a;
        } else if constexpr (std::is_same_v<T, GeneralizedSpec>) {
          j["d"] = s.d;
          j["weights"] = s.weights;
          json us = json::array();
          for (const auto& u : s.unitaries) us.push_back(matrix_to_json(u));
          j["unitaries"] = std::move(us);
        } else if constexpr (std::is_same_v<T, WeylSpec>) {
          j["d"] = s.d;
          j["c"] = s.c;
        } else if constexpr (std::is_same_v<T, DiagonalSpec>) {
          j["d"] = s.d;
          j["weights"] = s.weights;
          j["phases"] = s.phases;
        } else if constexpr (std::is_same_v<T, QutritSpec>) {
          j["theta"] = s.theta;
          std::array<double, 4> original{};
          for (std::size_t k = 0; k < 4; ++k) original[s.permutation[k]] = s.a[k];
          j["a"] = original;
        } else if constexpr (std::is_same_v<T, DoublyDepolarizingSpec>) {
          j["d"] = s.d;
          j["m"] = s.m;
          j["a"] = s.a;
          j["b"] = s.b;
        } else if constexpr (std::is_same_v<T, SuccessiveSpec>) {
          j["d"] = s.d;
          j["x"] = s.x;
        } else if constexpr (std::is_same_v<T, ContractionSpec>) {
          j["d"] = s.d;
          j["weights"] = s.weights;
          json cs = json::array();
          for (const auto& c : s.contractions) cs.push_back(matrix_to_json(c));
          j["contractions"] = std::move(cs);
        }
      },
      spec);
  return j;
}

FamilySpec family_from_json(const json& j) {
  const json& tag_field = field(j, "family");
  if (!tag_field.is_string()) throw ConfigInvalid("\"family\" must be a string");
  const std::string tag = tag_field.get<std::string>();

  if (tag == "depolarizing") {
    return DepolarizingSpec{size_field(j, "d"), real_field(j, "a")};
  }
  if (tag == "generalized") {
    GeneralizedSpec s;
    s.d = size_field(j, "d");
    s.weights = real_vector(field(j, "weights"), "weights");
    s.unitaries = matrix_list(field(j, "unitaries"), "unitaries");
    return s;
  }
  if (tag == "weyl") {
    WeylSpec s;
    s.d = size_field(j, "d");
    const json& table = field(j, "c");
    if (!table.is_array()) throw ConfigInvalid("\"c\" must be an array of rows");
    for (const auto& row : table) s.c.push_back(real_vector(row, "c row"));
    return s;
  }
  if (tag == "diagonal") {
    DiagonalSpec s;
    s.d = size_field(j, "d");
    s.weights = real_vector(field(j, "weights"), "weights");
    const json& table = field(j, "phases");
    if (!table.is_array()) throw ConfigInvalid("\"phases\" must be an array of rows");
    for (const auto& row : table) s.phases.push_back(real_vector(row, "phase row"));
    return s;
  }
  if (tag == "qutrit") {
    const std::vector<double> raw = real_vector(field(j, "a"), "a");
    if (raw.size() != 4) throw ConfigInvalid("qutrit needs exactly four weights");
    std::array<double, 4> weights{raw[0], raw[1], raw[2], raw[3]};
    const double theta = j.contains("theta") ? real_field(j, "theta") : 0.0;
    return make_qutrit_spec(theta, weights);
  }
  if (tag == "doubly_depolarizing") {
    return DoublyDepolarizingSpec{size_field(j, "d"), size_field(j, "m"), real_field(j, "a"),
                                  real_field(j, "b")};
  }
  if (tag == "successive") {
    return SuccessiveSpec{size_field(j, "d"), real_vector(field(j, "x"), "x")};
  }
  if (tag == "contraction") {
    ContractionSpec s;
    s.d = size_field(j, "d");
    s.weights = real_vector(field(j, "weights"), "weights");
    s.contractions = matrix_list(field(j, "contractions"), "contractions");
    return s;
  }
  throw ConfigInvalid("unknown family: " + tag);
}

FamilySpec load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return family_from_json(j);
}

void save_family(const FamilySpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out << family_to_json(spec).dump(2) << "\n";
  if (!out) throw IoFailure("write to " + path + " failed");
}

}  // namespace qchan
