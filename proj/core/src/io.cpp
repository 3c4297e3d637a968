#include "gqt/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gqt {

namespace {

complex entry_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw DomainError("complex entry must be a number or a [re, im] pair, got " + j.dump());
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

void write_string(std::ostringstream& out, const std::string& s) {
  // Reuse nlohmann's escaping.
  out << Json(s).dump();
}

void write(std::ostringstream& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad;
        write_string(out, it.key());
        out << (indent > 0 ? ": " : ":");
        write(out, it.value(), indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << (flat && indent > 0 ? ", " : ",");
        if (!flat) out << nl << pad;
        first = false;
        write(out, e, indent, depth + 1);
      }
      if (!flat) out << nl << close_pad;
      out << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x)) {
        out << format_double(x);
      } else {
        out << "null";
      }
      return;
    }
    case Json::value_t::string:
      write_string(out, j.get<std::string>());
      return;
    default:
      out << j.dump();
      return;
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json& j, int indent) {
  std::ostringstream out;
  write(out, j, indent, 0);
  return out.str();
}

Json to_json(const CVector& v) {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(Json::array({v(k).real(), v(k).imag()}));
  return arr;
}

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const ProjectiveState& s) { return to_json(s.amplitudes()); }

Json to_json(const WeightedStateEnsemble& e) {
  Json arr = Json::array();
  for (const auto& entry : e.entries()) {
    arr.push_back(Json{{"weight", entry.weight}, {"amplitudes", to_json(entry.state)}});
  }
  return arr;
}

Json to_json(const McEstimate& e) {
  return Json{{"value", finite_or_null(e.value)},
              {"std_error", finite_or_null(e.std_error)},
              {"n", e.n},
              {"acceptance_rate", e.acceptance_rate}};
}

Json to_json(const ThermoReport& r) {
  return Json{{"Q", finite_or_null(r.Q)}, {"log_Q", finite_or_null(r.log_Q)}, {"F", finite_or_null(r.F)},
              {"U", finite_or_null(r.U)}, {"Hq", finite_or_null(r.Hq)},       {"var_h", finite_or_null(r.var_h)}};
}

Json to_json(const JarzynskiReport& r) {
  return Json{{"mean_exp_neg_beta_W", r.mean_exp_neg_beta_W},
              {"std_error", r.std_error},
              {"delta_F_closed_form", r.delta_F_closed_form},
              {"exp_neg_beta_delta_F", r.exp_neg_beta_delta_F},
              {"mean_W", r.mean_W},
              {"mean_W_std_error", r.mean_W_std_error},
              {"discrepancy_sigma", finite_or_null(r.discrepancy_sigma)},
              {"second_law_holds", r.second_law_holds},
              {"acceptance_rate", r.acceptance_rate},
              {"n_trajectories", r.n_trajectories}};
}

Json to_json(const FirstLawReport& r) {
  return Json{{"dlambda", r.dlambda},
              {"dU", r.dU},
              {"dF", r.dF},
              {"dHq", r.dHq},
              {"dW", r.dW},
              {"dQ", r.dQ},
              {"residual_energy", r.residual_energy},
              {"residual_free", r.residual_free},
              {"residual_entropy", r.residual_entropy}};
}

CVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("vector must be a nonempty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = entry_from_json(j[k]);
  return v;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw DomainError("matrix rows must be nonempty arrays");
  const std::size_t cols = j[0].size();
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw DomainError("matrix rows have unequal lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entry_from_json(j[r][c]);
    }
  }
  return m;
}

ProjectiveState state_from_json(const Json& j) { return ProjectiveState::from_amplitudes(vector_from_json(j)); }

WeightedStateEnsemble ensemble_from_json(const Json& j) {
  if (!j.is_array()) throw DomainError("ensemble must be an array of {weight, amplitudes}");
  std::vector<WeightedState> entries;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("weight") || !e.contains("amplitudes")) {
      throw DomainError("ensemble entry must have weight and amplitudes");
    }
    entries.push_back({e.at("weight").get<double>(), state_from_json(e.at("amplitudes"))});
  }
  return WeightedStateEnsemble(std::move(entries));
}

}  // namespace gqt
