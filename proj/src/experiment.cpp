#include "qchan/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "qchan/capacity.hpp"
#include "qchan/channel_json.hpp"
#include "qchan/errors.hpp"
#include "qchan/measures.hpp"
#include "qchan/parallel.hpp"
#include "qchan/version.hpp"

namespace qchan {

using nlohmann::json;

namespace {

const char* const kKinds[] = {"capacity_verify", "additivity", "minent",          "pnorm",
                              "sweep",           "ppt_scan",   "classical_reduce"};

std::string fmt_d(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_u(unsigned long long v) { return std::to_string(v); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigInvalid(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::size_t size_from_json(const json& v, const char* what) {
  const double r = json_real(v);
  const auto n = static_cast<long long>(std::llround(r));
  if (n < 0 || std::abs(r - static_cast<double>(n)) > 1e-9)
    throw ConfigInvalid(std::string(what) + " must be a non-negative integer");
  return static_cast<std::size_t>(n);
}

std::size_t spec_dim(const FamilySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QutritSpec>)
          return 3;
        else
          return s.d;
      },
      spec);
}

void append_params(ResultRow& row, const FamilySpec& spec) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DepolarizingSpec>) {
          row.emplace_back("d", fmt_u(s.d));
          row.emplace_back("a", fmt_d(s.a));
        } else if constexpr (std::is_same_v<T, GeneralizedSpec> ||
                             std::is_same_v<T, ContractionSpec>) {
          row.emplace_back("d", fmt_u(s.d));
        } else if constexpr (std::is_same_v<T, WeylSpec>) {
          row.emplace_back("d", fmt_u(s.d));
        } else if constexpr (std::is_same_v<T, DiagonalSpec>) {
          double a = 0.0;
          for (double w : s.weights) a += w;
          row.emplace_back("d", fmt_u(s.d));
          row.emplace_back("a", fmt_d(a));
        } else if constexpr (std::is_same_v<T, QutritSpec>) {
          row.emplace_back("theta", fmt_d(s.theta));
          row.emplace_back("a0", fmt_d(s.a[0]));
          row.emplace_back("a1", fmt_d(s.a[1]));
          row.emplace_back("a2", fmt_d(s.a[2]));
          row.emplace_back("a3", fmt_d(s.a[3]));
          row.emplace_back("a", fmt_d(s.a[0] + s.a[1] + s.a[2] + s.a[3]));
        } else if constexpr (std::is_same_v<T, DoublyDepolarizingSpec>) {
          row.emplace_back("d", fmt_u(s.d));
          row.emplace_back("m", fmt_u(s.m));
          row.emplace_back("a", fmt_d(s.a));
          row.emplace_back("b", fmt_d(s.b));
        } else if constexpr (std::is_same_v<T, SuccessiveSpec>) {
          row.emplace_back("d", fmt_u(s.d));
          std::string xs;
          for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (k) xs += ';';
            xs += fmt_d(s.x[k]);
          }
          row.emplace_back("x", xs);
        }
      },
      spec);
}

// (d, a) of the depolarizing channel whose closed forms this family shares,
// when there is one.
std::optional<std::pair<std::size_t, double>> depol_equivalent(const FamilySpec& spec) {
  if (const auto* s = std::get_if<DepolarizingSpec>(&spec)) return {{s->d, s->a}};
  if (const auto* s = std::get_if<DiagonalSpec>(&spec)) {
    double a = 0.0;
    for (double w : s->weights) a += w;
    return {{s->d, a}};
  }
  if (const auto* s = std::get_if<QutritSpec>(&spec)) {
    return {{std::size_t{3}, s->a[0] + s->a[1] + s->a[2] + s->a[3]}};
  }
  if (const auto* s = std::get_if<DoublyDepolarizingSpec>(&spec)) return {{s->d, s->a}};
  return std::nullopt;
}

ComplexMatrix maximally_mixed(std::size_t d) {
  return (1.0 / static_cast<double>(d)) * ComplexMatrix::identity(d);
}

std::vector<ComplexMatrix> qutrit_reduction_basis() {
  ComplexMatrix plus(3, 1), minus(3, 1);
  const double s = 1.0 / std::sqrt(2.0);
  plus(1, 0) = s;
  plus(2, 0) = s;
  minus(1, 0) = s;
  minus(2, 0) = -s;
  return {basis_ket(3, 0), plus, minus};
}

struct Candidate {
  ComplexMatrix avg_output;
  double capacity_bits = 0.0;
  double s_min_bits = 0.0;
  bool smin_converged = true;
};

Candidate make_candidate(const KrausChannel& phi, const FamilySpec& spec,
                         const ExperimentConfig& cfg) {
  Candidate cand;
  const std::size_t d = phi.dim();
  if (const auto* s = std::get_if<QutritSpec>(&spec)) {
    const QutritEnsembleResult res = qutrit_optimal_ensemble(*s);
    cand.avg_output = phi.apply(res.ensemble.average());
    cand.capacity_bits = res.c_star;
    cand.s_min_bits = depol_reference_entropy(3, res.a);
  } else if (const auto* s = std::get_if<DoublyDepolarizingSpec>(&spec)) {
    const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(s->d, s->m, s->a, s->b);
    cand.avg_output = phi.apply(res.ensemble.average());
    cand.capacity_bits = res.c_star;
    cand.s_min_bits = depol_reference_entropy(s->d, s->a);
  } else if (std::holds_alternative<DepolarizingSpec>(spec) ||
             std::holds_alternative<DiagonalSpec>(spec)) {
    const auto [dd, a] = *depol_equivalent(spec);
    cand.avg_output = maximally_mixed(dd);
    cand.s_min_bits = depol_reference_entropy(dd, a);
    cand.capacity_bits = std::log2(static_cast<double>(dd)) - cand.s_min_bits;
  } else if (std::holds_alternative<WeylSpec>(spec)) {
    const PurityReport rep = min_output_entropy(phi, cfg.starts, cfg.seed, cfg.max_iter);
    for (const auto& t : rep.traces) cand.smin_converged = cand.smin_converged && t.converged;
    cand.avg_output = maximally_mixed(d);
    cand.s_min_bits = rep.optimum_value;
    cand.capacity_bits = std::log2(static_cast<double>(d)) - rep.optimum_value;
  } else if (std::holds_alternative<SuccessiveSpec>(spec)) {
    const auto g = cq_matrix(phi);
    const ClassicalCapacityResult ba = classical_capacity(g);
    ComplexMatrix avg_in(d, d);
    for (std::size_t k = 0; k < d; ++k) avg_in(k, k) = ba.input_distribution[k];
    cand.avg_output = phi.apply(avg_in);
    cand.capacity_bits = ba.capacity_bits;
    const PurityReport rep = min_output_entropy(phi, cfg.starts, cfg.seed, cfg.max_iter);
    for (const auto& t : rep.traces) cand.smin_converged = cand.smin_converged && t.converged;
    cand.s_min_bits = rep.optimum_value;
  } else {
    throw ConfigInvalid("no capacity candidate for family: " + family_tag(spec));
  }
  return cand;
}

ResultRow run_capacity_point(const FamilySpec& spec, const ExperimentConfig& cfg, bool two_copies,
                             json& cert, bool& ok) {
  ResultRow row;
  row.emplace_back("family", family_tag(spec));
  append_params(row, spec);

  const KrausChannel phi = build_channel(spec);
  const Candidate cand = make_candidate(phi, spec, cfg);
  const std::size_t d = phi.dim();
  CapacityCertificate vc;
  double candidate_capacity = cand.capacity_bits;
  if (!two_copies) {
    vc = verify_candidate(phi, cand.avg_output, cand.capacity_bits, {StartRecipe::RandomPure},
                          StartDims{d, 0}, cfg.starts, cfg.seed, cfg.max_iter, cfg.verify_tol);
    row.emplace_back("c_star_bits", fmt_d(cand.capacity_bits));
    row.emplace_back("s_min_bits", fmt_d(cand.s_min_bits));
    row.emplace_back("gap_logd", fmt_d(std::log2(static_cast<double>(d)) - cand.s_min_bits -
                                       cand.capacity_bits));
  } else {
    const KrausChannel phi2 = tensor(phi, phi);
    candidate_capacity = 2.0 * cand.capacity_bits;
    vc = verify_candidate(
        phi2, kron(cand.avg_output, cand.avg_output), candidate_capacity,
        {StartRecipe::RandomPure, StartRecipe::MaxEntangledPhases, StartRecipe::ProductSum},
        StartDims{d, d}, cfg.starts, cfg.seed, cfg.max_iter, cfg.verify_tol);
    row.emplace_back("c_star_bits", fmt_d(cand.capacity_bits));
    row.emplace_back("c2_candidate_bits", fmt_d(candidate_capacity));
  }
  row.emplace_back("worst_violation", fmt_d(vc.worst_violation));
  row.emplace_back("verified", vc.verified ? "1" : "0");
  row.emplace_back("starts", fmt_u(cfg.starts));
  row.emplace_back("seed", fmt_u(cfg.seed));

  ok = vc.verified && vc.unconverged == 0 && cand.smin_converged;
  cert = json{{"family", family_tag(spec)},
              {"params", family_to_json(spec)},
              {"candidate_capacity", candidate_capacity},
              {"worst_violation", vc.worst_violation},
              {"verified", vc.verified},
              {"seed", cfg.seed},
              {"starts", cfg.starts},
              {"iterations_max", vc.iterations_max}};
  return row;
}

ResultRow run_minent_point(const FamilySpec& spec, const ExperimentConfig& cfg, bool& ok) {
  ResultRow row;
  row.emplace_back("family", family_tag(spec));
  append_params(row, spec);
  const KrausChannel phi = build_channel(spec);
  const PurityReport rep = min_output_entropy(phi, cfg.starts, cfg.seed, cfg.max_iter);
  bool conv = true;
  for (const auto& t : rep.traces) conv = conv && t.converged;
  row.emplace_back("s_min_bits", fmt_d(rep.optimum_value));
  if (const auto eq = depol_equivalent(spec)) {
    const double closed = depol_reference_entropy(eq->first, eq->second);
    row.emplace_back("closed_bits", fmt_d(closed));
    row.emplace_back("abs_err", fmt_d(std::abs(rep.optimum_value - closed)));
  } else {
    row.emplace_back("closed_bits", "");
    row.emplace_back("abs_err", "");
  }
  row.emplace_back("converged", conv ? "1" : "0");
  row.emplace_back("starts", fmt_u(cfg.starts));
  row.emplace_back("seed", fmt_u(cfg.seed));
  ok = conv;
  return row;
}

ResultRow run_pnorm_point(const FamilySpec& spec, const ExperimentConfig& cfg, bool& ok) {
  ResultRow row;
  row.emplace_back("family", family_tag(spec));
  append_params(row, spec);
  const KrausChannel phi = build_channel(spec);
  const PurityReport rep = max_output_p_norm(phi, cfg.p, cfg.starts, cfg.seed, cfg.max_iter);
  bool conv = true;
  for (const auto& t : rep.traces) conv = conv && t.converged;
  row.emplace_back("p", fmt_d(cfg.p));
  row.emplace_back("nu_p", fmt_d(rep.optimum_value));
  if (const auto eq = depol_equivalent(spec)) {
    const double closed = depol_reference_pnorm(eq->first, eq->second, cfg.p);
    row.emplace_back("closed_value", fmt_d(closed));
    row.emplace_back("abs_err", fmt_d(std::abs(rep.optimum_value - closed)));
  } else {
    row.emplace_back("closed_value", "");
    row.emplace_back("abs_err", "");
  }
  row.emplace_back("converged", conv ? "1" : "0");
  row.emplace_back("starts", fmt_u(cfg.starts));
  row.emplace_back("seed", fmt_u(cfg.seed));
  ok = conv;
  return row;
}

ResultRow run_sweep_point(const FamilySpec& spec, const ExperimentConfig& cfg) {
  ResultRow row;
  row.emplace_back("family", family_tag(spec));
  append_params(row, spec);
  double c_star = 0.0, s_min = 0.0, delta_s = 0.0;
  std::string x, t, t_perp;
  std::size_t d = spec_dim(spec);
  if (const auto* s = std::get_if<QutritSpec>(&spec)) {
    const QutritEnsembleResult res = qutrit_optimal_ensemble(*s);
    c_star = res.c_star;
    s_min = depol_reference_entropy(3, res.a);
    delta_s = res.delta_s;
    x = fmt_d(res.x);
  } else if (const auto* sd = std::get_if<DoublyDepolarizingSpec>(&spec)) {
    const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(sd->d, sd->m, sd->a, sd->b);
    c_star = res.c_star;
    s_min = depol_reference_entropy(sd->d, sd->a);
    delta_s = res.delta_s;
    t = fmt_d(res.t);
    t_perp = fmt_d(res.t_perp);
  } else if (const auto eq = depol_equivalent(spec)) {
    s_min = depol_reference_entropy(eq->first, eq->second);
    c_star = std::log2(static_cast<double>(eq->first)) - s_min;
  } else {
    throw ConfigInvalid("sweep supports closed-form families only");
  }
  row.emplace_back("c_star_bits", fmt_d(c_star));
  row.emplace_back("s_min_bits", fmt_d(s_min));
  row.emplace_back("gap_logd", fmt_d(std::log2(static_cast<double>(d)) - s_min - c_star));
  row.emplace_back("delta_s_bits", fmt_d(delta_s));
  row.emplace_back("x", x);
  row.emplace_back("t", t);
  row.emplace_back("t_perp", t_perp);
  row.emplace_back("seed", fmt_u(cfg.seed));
  return row;
}

ResultRow run_ppt_point(const FamilySpec& spec, const ExperimentConfig& cfg) {
  const auto* s = std::get_if<DepolarizingSpec>(&spec);
  if (!s) throw ConfigInvalid("ppt_scan supports the depolarizing family only");
  ResultRow row;
  row.emplace_back("family", family_tag(spec));
  append_params(row, spec);
  const KrausChannel phi = build_channel(spec);
  const ComplexMatrix choi = choi_matrix(phi);
  const double pt_min = pt_min_eigenvalue(choi, s->d, s->d);
  row.emplace_back("pt_min_eig", fmt_d(pt_min));
  row.emplace_back("ppt", pt_min >= -1e-11 ? "1" : "0");
  row.emplace_back("seed", fmt_u(cfg.seed));
  return row;
}

ResultRow run_reduce_point(const FamilySpec& spec, const ExperimentConfig& cfg) {
  ResultRow row;
  row.emplace_back("family", family_tag(spec));
  append_params(row, spec);
  const KrausChannel phi = build_channel(spec);
  const std::size_t d = phi.dim();

  std::vector<std::vector<double>> g;
  std::optional<std::vector<double>> closed_weights;
  std::optional<double> closed_capacity;
  if (const auto* s = std::get_if<QutritSpec>(&spec)) {
    g = cq_matrix(phi, qutrit_reduction_basis());
    const QutritEnsembleResult res = qutrit_optimal_ensemble(*s);
    closed_weights = std::vector<double>{1.0 - 2.0 * res.x, res.x, res.x};
    closed_capacity = res.c_star;
  } else if (const auto* sd = std::get_if<DoublyDepolarizingSpec>(&spec)) {
    g = cq_matrix(phi);
    const DoublyDepolEnsembleResult res = doubly_depol_optimal_ensemble(sd->d, sd->m, sd->a, sd->b);
    closed_weights = res.ensemble.weights;
    closed_capacity = res.c_star;
  } else if (const auto eq = depol_equivalent(spec)) {
    g = cq_matrix(phi);
    closed_weights = std::vector<double>(d, 1.0 / static_cast<double>(d));
    closed_capacity =
        std::log2(static_cast<double>(d)) - depol_reference_entropy(eq->first, eq->second);
  } else if (std::holds_alternative<SuccessiveSpec>(spec)) {
    g = cq_matrix(phi);
  } else {
    throw ConfigInvalid("classical_reduce does not support family: " + family_tag(spec));
  }

  const ClassicalCapacityResult ba = classical_capacity(g);
  row.emplace_back("capacity_bits", fmt_d(ba.capacity_bits));
  if (closed_capacity) {
    row.emplace_back("c_star_bits", fmt_d(*closed_capacity));
    row.emplace_back("abs_err", fmt_d(std::abs(ba.capacity_bits - *closed_capacity)));
    double derr = 0.0;
    for (std::size_t k = 0; k < closed_weights->size(); ++k)
      derr = std::max(derr, std::abs(ba.input_distribution[k] - (*closed_weights)[k]));
    row.emplace_back("distribution_err", fmt_d(derr));
  } else {
    row.emplace_back("c_star_bits", "");
    row.emplace_back("abs_err", "");
    row.emplace_back("distribution_err", "");
  }
  row.emplace_back("ba_iterations", fmt_u(ba.iterations));
  row.emplace_back("seed", fmt_u(cfg.seed));
  return row;
}

std::array<double, 3> parse_split(const std::string& tag) {
  if (tag == "equal") return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::array<double, 3> f{};
  std::stringstream ss(tag);
  std::string part;
  int n = 0;
  double sum = 0.0;
  while (std::getline(ss, part, '/')) {
    if (n >= 3) throw ConfigInvalid("split needs three fractions: " + tag);
    try {
      f[static_cast<std::size_t>(n)] = std::stod(part);
    } catch (const std::exception&) {
      throw ConfigInvalid("bad split fraction: " + tag);
    }
    if (f[static_cast<std::size_t>(n)] < 0.0)
      throw ConfigInvalid("split fractions must be non-negative: " + tag);
    sum += f[static_cast<std::size_t>(n)];
    ++n;
  }
  if (n != 3 || std::abs(sum - 1.0) > 1e-9)
    throw ConfigInvalid("split fractions must sum to one: " + tag);
  return f;
}

DiagonalSpec clock_diagonal_spec(std::size_t d, double a) {
  if (d < 2) throw ConfigInvalid("diagonal grid needs d >= 2");
  DiagonalSpec s;
  s.d = d;
  const double w = a / static_cast<double>(d - 1);
  for (std::size_t k = 1; k < d; ++k) {
    s.weights.push_back(w);
    std::vector<double> ph(d, 0.0);
    for (std::size_t m = 0; m < d; ++m)
      ph[m] = 2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(d);
    s.phases.push_back(std::move(ph));
  }
  return s;
}

}  // namespace

GridRange GridRange::from_values(std::vector<double> v) {
  GridRange r;
  r.explicit_values = std::move(v);
  r.has_explicit = true;
  return r;
}

GridRange GridRange::from_json(const json& j) {
  auto values_of = [](const json& arr) {
    std::vector<double> v;
    v.reserve(arr.size());
    for (const auto& e : arr) v.push_back(json_real(e));
    return v;
  };
  if (j.is_array()) return from_values(values_of(j));
  if (j.is_object()) {
    if (j.contains("values")) {
      const json& arr = j.at("values");
      if (!arr.is_array()) throw ConfigInvalid("\"values\" must be an array");
      return from_values(values_of(arr));
    }
    GridRange r;
    r.start = json_real(field(j, "start"));
    r.stop = json_real(field(j, "stop"));
    r.step = json_real(field(j, "step"));
    return r;
  }
  if (j.is_number() || j.is_string()) return from_values({json_real(j)});
  throw ConfigInvalid("grid axis must be an array, a range object, or a number");
}

std::vector<double> GridRange::values() const {
  if (has_explicit) {
    for (double v : explicit_values) {
      if (!std::isfinite(v)) throw RangeInvalid("grid values must be finite");
    }
    return explicit_values;
  }
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw RangeInvalid("range endpoints must be finite");
  if (!(step > 0.0)) throw RangeInvalid("step must be positive");
  if (start > stop + 1e-12) throw RangeInvalid("start must not exceed stop");
  if (step < (std::abs(start) + std::abs(stop) + 1.0) * 1e-14)
    throw RangeInvalid("step too small to resolve");
  const double span = (stop - start) / step;
  if (span > 1e6) throw RangeInvalid("range produces too many points");
  const std::size_t n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i) * step;
  return v;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  const json& kind = field(j, "experiment");
  if (!kind.is_string()) throw ConfigInvalid("\"experiment\" must be a string");
  c.kind = kind.get<std::string>();
  if (std::find(std::begin(kKinds), std::end(kKinds), c.kind) == std::end(kKinds))
    throw ConfigInvalid("unknown experiment kind: " + c.kind);

  const bool has_family = j.contains("family");
  const bool has_grid = j.contains("grid");
  if (has_family == has_grid)
    throw ConfigInvalid("config needs exactly one of \"family\" or \"grid\"");
  if (has_family) c.family = family_from_json(j.at("family"));
  if (has_grid) {
    c.grid = j.at("grid");
    if (!c.grid.is_object() || !c.grid.contains("family"))
      throw ConfigInvalid("\"grid\" must be an object with a \"family\" tag");
  }

  if (!j.contains("seed")) throw ConfigInvalid("\"seed\" is required");
  const json& seed = j.at("seed");
  if (seed.is_number_unsigned()) {
    c.seed = seed.get<std::uint64_t>();
  } else if (seed.is_number_integer() && seed.get<long long>() >= 0) {
    c.seed = static_cast<std::uint64_t>(seed.get<long long>());
  } else if (seed.is_string()) {
    char* end = nullptr;
    const std::string s = seed.get<std::string>();
    c.seed = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
      throw ConfigInvalid("\"seed\" must be a non-negative integer");
  } else {
    throw ConfigInvalid("\"seed\" must be a non-negative integer");
  }

  if (j.contains("starts")) {
    c.starts = size_from_json(j.at("starts"), "\"starts\"");
    if (c.starts == 0) throw ConfigInvalid("\"starts\" must be positive");
  }
  if (j.contains("verify_tol")) c.verify_tol = json_real(j.at("verify_tol"));
  if (j.contains("p")) c.p = json_real(j.at("p"));
  if (j.contains("max_iter")) {
    c.max_iter = size_from_json(j.at("max_iter"), "\"max_iter\"");
    if (c.max_iter == 0) throw ConfigInvalid("\"max_iter\" must be positive");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (!o.is_string()) throw ConfigInvalid("\"output\" must be a string");
    c.output = o.get<std::string>();
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return from_json(j);
}

std::vector<FamilySpec> expand_grid(const ExperimentConfig& config) {
  if (config.family) return {*config.family};
  const json& g = config.grid;
  const json& tag_field = field(g, "family");
  if (!tag_field.is_string()) throw ConfigInvalid("grid \"family\" must be a string");
  const std::string tag = tag_field.get<std::string>();
  std::vector<FamilySpec> out;

  if (tag == "qutrit") {
    const auto as = GridRange::from_json(field(g, "a")).values();
    const auto offsets = GridRange::from_json(field(g, "a0_offset")).values();
    const json& splits_json = field(g, "splits");
    if (!splits_json.is_array() || splits_json.empty())
      throw ConfigInvalid("\"splits\" must be a non-empty array of tags");
    std::vector<std::string> splits;
    for (const auto& s : splits_json) {
      if (!s.is_string()) throw ConfigInvalid("split tags must be strings");
      splits.push_back(s.get<std::string>());
    }
    const double theta = g.contains("theta") ? json_real(g.at("theta")) : 0.0;
    for (double a : as) {
      for (double off : offsets) {
        const double a0 = a / 2.0 + off;
        if (a0 > a - 0.01 + 1e-12) continue;
        for (const std::string& split : splits) {
          const std::array<double, 3> f = parse_split(split);
          const double rest = a - a0;
          out.emplace_back(
              make_qutrit_spec(theta, {a0, f[0] * rest, f[1] * rest, f[2] * rest}));
        }
      }
    }
    return out;
  }
  if (tag == "doubly_depolarizing") {
    const std::size_t d = size_from_json(field(g, "d"), "\"d\"");
    const std::size_t m = size_from_json(field(g, "m"), "\"m\"");
    const auto as = GridRange::from_json(field(g, "a")).values();
    const auto bs = GridRange::from_json(field(g, "b")).values();
    for (double a : as)
      for (double b : bs) out.emplace_back(DoublyDepolarizingSpec{d, m, a, b});
    return out;
  }
  if (tag == "depolarizing") {
    const auto ds = GridRange::from_json(field(g, "d")).values();
    const bool absolute = g.contains("a");
    if (!absolute && !g.contains("a_offsets"))
      throw ConfigInvalid("depolarizing grid needs \"a\" or \"a_offsets\"");
    const auto axis =
        GridRange::from_json(absolute ? g.at("a") : g.at("a_offsets")).values();
    for (double draw : ds) {
      const std::size_t d = size_from_json(json(draw), "\"d\"");
      for (double v : axis) {
        const double a = absolute ? v : 1.0 / static_cast<double>(d + 1) + v;
        out.emplace_back(DepolarizingSpec{d, a});
      }
    }
    return out;
  }
  if (tag == "diagonal") {
    const auto ds = GridRange::from_json(field(g, "d")).values();
    const auto as = GridRange::from_json(field(g, "a")).values();
    for (double draw : ds) {
      const std::size_t d = size_from_json(json(draw), "\"d\"");
      for (double a : as) out.emplace_back(clock_diagonal_spec(d, a));
    }
    return out;
  }
  throw ConfigInvalid("grids are not supported for family: " + tag);
}

RunOutcome run_experiment(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  if (const char* env = std::getenv("QCHAN_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw ConfigInvalid("QCHAN_SEED must be an unsigned integer");
    config.seed = v;
  }
  const std::vector<FamilySpec> specs = expand_grid(config);

  RunOutcome out;
  out.certificates = json::array();
  const bool verifying = config.kind == "capacity_verify" || config.kind == "additivity";

  std::vector<ResultRow> rows(specs.size());
  std::vector<json> certs(specs.size());
  std::vector<char> flags(specs.size(), 1);

  auto handle_point = [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    ResultRow row;
    if (config.kind == "capacity_verify") {
      row = run_capacity_point(specs[i], config, false, certs[i], ok);
    } else if (config.kind == "additivity") {
      row = run_capacity_point(specs[i], config, true, certs[i], ok);
    } else if (config.kind == "minent") {
      row = run_minent_point(specs[i], config, ok);
    } else if (config.kind == "pnorm") {
      row = run_pnorm_point(specs[i], config, ok);
    } else if (config.kind == "sweep") {
      row = run_sweep_point(specs[i], config);
    } else if (config.kind == "ppt_scan") {
      row = run_ppt_point(specs[i], config);
    } else {
      row = run_reduce_point(specs[i], config);
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
            .count();
    row.emplace_back("wall_ms", std::to_string(ms));
    row.emplace_back("version", kVersionTag);
    rows[i] = std::move(row);
    flags[i] = ok ? 1 : 0;
  };

  if (verifying) {
    // starts already run in parallel inside verify_candidate
    for (std::size_t i = 0; i < specs.size(); ++i) handle_point(i);
  } else {
    parallel_for_index(specs.size(), handle_point);
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    out.ok = out.ok && flags[i] != 0;
    if (verifying) out.certificates.push_back(std::move(certs[i]));
  }
  out.rows = std::move(rows);

  if (!config.output.empty()) {
    write_csv(config.output, out.rows);
    out.csv_path = config.output;
    if (verifying) {
      const std::string side = config.output + ".certs.json";
      std::ofstream s(side);
      if (!s) throw IoFailure("cannot open " + side + " for writing");
      s << out.certificates.dump(2) << "\n";
      if (!s) throw IoFailure("write to " + side + " failed");
    }
  }
  return out;
}

bool verify_stored(const ExperimentConfig& config) {
  if (config.kind != "capacity_verify" && config.kind != "additivity")
    throw ConfigInvalid("verify needs a certificate-producing experiment kind");
  if (config.output.empty()) throw ConfigInvalid("config has no output path to verify");
  const std::string side = config.output + ".certs.json";
  std::ifstream in(side);
  if (!in) throw IoFailure("cannot open " + side);
  json stored;
  try {
    in >> stored;
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("bad JSON in ") + side + ": " + e.what());
  }

  ExperimentConfig replay = config;
  replay.output.clear();
  const RunOutcome fresh = run_experiment(replay);
  if (!stored.is_array() || stored.size() != fresh.certificates.size()) return false;
  static const char* const kKeys[] = {"family",   "params", "candidate_capacity",
                                      "worst_violation", "verified", "seed",
                                      "starts",   "iterations_max"};
  for (std::size_t i = 0; i < stored.size(); ++i) {
    for (const char* key : kKeys) {
      if (!stored[i].contains(key)) return false;
      if (stored[i].at(key) != fresh.certificates[i].at(key)) return false;
    }
  }
  return true;
}

std::vector<std::string> preset_names() {
  return {"qutrit-6.2.1",    "dd4-6.2.1",         "qutrit-additivity",
          "dd4-additivity",  "diagonal-capacity", "ppt-boundary"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.seed = 20240817;
  if (name == "qutrit-6.2.1") {
    c.kind = "capacity_verify";
    c.starts = 50;
    c.output = "qutrit-621.csv";
    c.grid = json{{"family", "qutrit"},
                  {"a", {{"start", 0.50}, {"stop", 0.90}, {"step", 0.02}}},
                  {"a0_offset", {{"start", 0.05}, {"stop", 0.45}, {"step", 0.05}}},
                  {"splits", {"equal", "0.5/0.3/0.2", "0.6/0.3/0.1", "0.7/0.2/0.1"}}};
  } else if (name == "dd4-6.2.1") {
    c.kind = "capacity_verify";
    c.starts = 50;
    c.output = "dd4-621.csv";
    c.grid = json{{"family", "doubly_depolarizing"},
                  {"d", 4},
                  {"m", 2},
                  {"a", {{"start", 0.5}, {"stop", 0.9}, {"step", 0.05}}},
                  {"b", {{"start", 0.5}, {"stop", 0.9}, {"step", 0.05}}}};
  } else if (name == "qutrit-additivity") {
    c.kind = "additivity";
    c.starts = 30;
    c.output = "qutrit-additivity.csv";
    c.grid = json{{"family", "qutrit"},
                  {"a", {0.5, 0.7, 0.9}},
                  {"a0_offset", {0.05}},
                  {"splits", {"equal"}}};
  } else if (name == "dd4-additivity") {
    c.kind = "additivity";
    c.starts = 30;
    c.output = "dd4-additivity.csv";
    c.grid = json{{"family", "doubly_depolarizing"},
                  {"d", 4},
                  {"m", 2},
                  {"a", {{"start", 0.5}, {"stop", 0.98}, {"step", 0.02}}},
                  {"b", {{"start", 0.5}, {"stop", 0.98}, {"step", 0.02}}}};
  } else if (name == "diagonal-capacity") {
    c.kind = "capacity_verify";
    c.starts = 20;
    c.output = "diagonal-capacity.csv";
    c.grid = json{{"family", "diagonal"}, {"d", {2, 3, 4}}, {"a", {0.3, 0.6, 0.9}}};
  } else if (name == "ppt-boundary") {
    c.kind = "ppt_scan";
    c.output = "ppt-boundary.csv";
    c.grid = json{{"family", "depolarizing"},
                  {"d", {2, 3, 4}},
                  {"a_offsets", {-0.10, -0.05, 0.0, 0.05, 0.10}}};
  } else {
    throw ConfigInvalid("unknown preset: " + name);
  }
  return c;
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  if (rows.empty()) return;
  const ResultRow& first = rows.front();
  for (std::size_t c = 0; c < first.size(); ++c) out << (c ? "," : "") << first[c].first;
  out << "\n";
  for (const ResultRow& row : rows) {
    if (row.size() != first.size()) throw Error("result rows differ in shape");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c].first != first[c].first) throw Error("result rows differ in shape");
      out << (c ? "," : "") << row[c].second;
    }
    out << "\n";
  }
  if (!out) throw IoFailure("write to " + path + " failed");
}

}  // namespace qchan
