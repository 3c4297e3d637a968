#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gqt_cli/cli.hpp"

namespace gqt::cli {

namespace {

std::string join(const std::vector<std::string>& keys) {
  std::string s;
  for (const auto& k : keys) {
    if (!s.empty()) s += ", ";
    s += k;
  }
  return s;
}

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const Json& j, const std::vector<std::string>& valid, const std::string& where) {
  require_object(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(valid.begin(), valid.end(), it.key()) == valid.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where + " (valid keys: " + join(valid) + ")");
    }
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": must be finite");
  return x;
}

std::uint64_t unsigned_integer(const Json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(where + ": expected a nonnegative integer");
}

std::string string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

// Either an explicit list or {start, stop, count} (inclusive, evenly spaced).
std::vector<double> grid(const Json& j, const std::string& where) {
  if (j.is_array()) return number_list(j, where);
  check_keys(j, {"start", "stop", "count"}, where);
  if (!j.contains("start") || !j.contains("stop") || !j.contains("count")) {
    throw ConfigError(where + ": a grid object needs start, stop and count");
  }
  const double a = number(j["start"], where + ".start");
  const double b = number(j["stop"], where + ".stop");
  const std::uint64_t n = unsigned_integer(j["count"], where + ".count");
  if (n < 1) throw ConfigError(where + ".count must be >= 1");
  std::vector<double> out(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    out[k] = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return out;
}

CMatrix matrix(const Json& j, const std::string& where) {
  try {
    return matrix_from_json(j);
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

// {"matrix": ...} | {"pauli_sum": [gx, gy, gz]} | {"diagonal": [...]}, or a bare matrix.
std::pair<HermitianObservable, std::string> operator_spec(const Json& j, const std::string& where) {
  try {
    if (j.is_array()) return {HermitianObservable(matrix(j, where)), "matrix"};
    check_keys(j, {"matrix", "pauli_sum", "diagonal"}, where);
    if (j.size() != 1) throw ConfigError(where + ": give exactly one of matrix, pauli_sum, diagonal");
    if (j.contains("matrix")) return {HermitianObservable(matrix(j["matrix"], where + ".matrix")), "matrix"};
    if (j.contains("pauli_sum")) {
      const auto g = number_list(j["pauli_sum"], where + ".pauli_sum");
      if (g.size() != 3) throw ConfigError(where + ".pauli_sum: expected [gx, gy, gz]");
      return {HermitianObservable::pauli_sum(g[0], g[1], g[2]), "pauli_sum"};
    }
    return {HermitianObservable::diagonal(number_list(j["diagonal"], where + ".diagonal")), "diagonal"};
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

MeasurementAxis axis(const Json& j) {
  try {
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      if (s == "x") return MeasurementAxis::x();
      if (s == "y") return MeasurementAxis::y();
      if (s == "z") return MeasurementAxis::z();
      throw ConfigError("axis: expected x | y | z or {theta, phi}");
    }
    check_keys(j, {"theta", "phi"}, "axis");
    const double theta = j.contains("theta") ? number(j["theta"], "axis.theta") : 0.0;
    const double phi = j.contains("phi") ? number(j["phi"], "axis.phi") : 0.0;
    return MeasurementAxis(theta, phi);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

Protocol ProtocolConfig::build() const {
  Schedule s = Schedule::constant(lambda_i);
  switch (shape) {
    case Schedule::Shape::constant:
      break;
    case Schedule::Shape::linear:
      s = Schedule::linear(lambda_i, lambda_f);
      break;
    case Schedule::Shape::sudden:
      s = Schedule::sudden(lambda_i, lambda_f);
      break;
  }
  return Protocol(h0, v, s, duration, n_steps);
}

std::vector<double> RunConfig::betas() const {
  if (!beta_grid.empty()) return beta_grid;
  if (beta) return {*beta};
  return {};
}

HermitianObservable RunConfig::hamiltonian_or_default() const {
  if (hamiltonian) return *hamiltonian;
  std::vector<double> d(*dimension);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = static_cast<double>(k);
  return HermitianObservable::diagonal(d);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dimension", "hamiltonian", "beta",   "beta_grid", "convention", "sampler",   "protocol", "shell",
      "energies",  "section",     "axis",   "observable", "method",    "estimator", "firstlaw", "bipartite",
      "output"};
  return keys;
}

Json parse_config_text(const std::string& text) {
  try {
    return Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

RunConfig parse_config(const Json& j) {
  check_keys(j, config_keys(), "config");
  RunConfig c;
  c.source = j;

  if (j.contains("hamiltonian")) {
    auto [h, kind] = operator_spec(j["hamiltonian"], "hamiltonian");
    c.hamiltonian = std::move(h);
    c.hamiltonian_spec = kind;
  }
  if (j.contains("dimension")) {
    const std::uint64_t d = unsigned_integer(j["dimension"], "dimension");
    if (d < 2) throw ConfigError("dimension must be >= 2");
    c.dimension = static_cast<std::size_t>(d);
  }
  if (c.hamiltonian) {
    if (c.dimension && *c.dimension != c.hamiltonian->dim()) {
      throw ConfigError("dimension " + std::to_string(*c.dimension) + " disagrees with the " +
                        std::to_string(c.hamiltonian->dim()) + "x" + std::to_string(c.hamiltonian->dim()) +
                        " hamiltonian");
    }
    if (c.hamiltonian->dim() < 2) throw ConfigError("hamiltonian must be at least 2x2");
    c.dimension = c.hamiltonian->dim();
  } else if (c.dimension) {
    c.hamiltonian_spec = "default_diagonal";
  }

  if (j.contains("beta") && j.contains("beta_grid")) throw ConfigError("give exactly one of beta, beta_grid");
  if (j.contains("beta")) c.beta = number(j["beta"], "beta");
  if (j.contains("beta_grid")) c.beta_grid = grid(j["beta_grid"], "beta_grid");

  if (j.contains("convention")) {
    const std::string s = string(j["convention"], "convention");
    if (s == "raw") {
      c.convention = MeasureConvention::raw;
    } else if (s == "normalized") {
      c.convention = MeasureConvention::normalized;
    } else {
      throw ConfigError("convention: expected raw | normalized");
    }
  }

  if (j.contains("sampler")) {
    const Json& s = j["sampler"];
    check_keys(s, {"seed", "samples", "streams"}, "sampler");
    if (s.contains("seed")) c.sampler.seed = unsigned_integer(s["seed"], "sampler.seed");
    if (s.contains("samples")) c.sampler.n_samples = unsigned_integer(s["samples"], "sampler.samples");
    if (s.contains("streams")) c.sampler.n_streams = unsigned_integer(s["streams"], "sampler.streams");
  }
  try {
    c.sampler.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  if (j.contains("protocol")) {
    const Json& p = j["protocol"];
    check_keys(p, {"h0", "v", "schedule", "lambda", "lambda_i", "lambda_f", "duration", "n_steps", "work_csv"},
               "protocol");
    if (!p.contains("h0") && !c.hamiltonian) throw ConfigError("protocol needs h0 (or a top-level hamiltonian)");
    const HermitianObservable h0 = p.contains("h0") ? operator_spec(p["h0"], "protocol.h0").first : *c.hamiltonian;
    if (!p.contains("v")) throw ConfigError("protocol needs v");
    HermitianObservable v = operator_spec(p["v"], "protocol.v").first;
    if (v.dim() != h0.dim()) throw ConfigError("protocol: h0 and v have different dimensions");
    Schedule::Shape shape = Schedule::Shape::linear;
    if (p.contains("schedule")) {
      try {
        shape = parse_schedule_shape(string(p["schedule"], "protocol.schedule"));
      } catch (const DomainError& e) {
        throw ConfigError(std::string("protocol.schedule: ") + e.what());
      }
    }
    double li = 0.0, lf = 1.0;
    if (shape == Schedule::Shape::constant) {
      if (p.contains("lambda_f")) throw ConfigError("protocol: a constant schedule takes lambda, not lambda_f");
      li = p.contains("lambda") ? number(p["lambda"], "protocol.lambda")
                                : (p.contains("lambda_i") ? number(p["lambda_i"], "protocol.lambda_i") : 0.0);
      lf = li;
    } else {
      if (p.contains("lambda")) throw ConfigError("protocol: lambda applies to constant schedules only");
      if (p.contains("lambda_i")) li = number(p["lambda_i"], "protocol.lambda_i");
      if (p.contains("lambda_f")) lf = number(p["lambda_f"], "protocol.lambda_f");
    }
    const double duration = p.contains("duration") ? number(p["duration"], "protocol.duration") : 1.0;
    const std::uint64_t steps = p.contains("n_steps") ? unsigned_integer(p["n_steps"], "protocol.n_steps") : 200;
    ProtocolConfig pc{h0, v, shape, li, lf, duration, static_cast<std::size_t>(steps), std::nullopt};
    if (p.contains("work_csv")) pc.work_csv = string(p["work_csv"], "protocol.work_csv");
    try {
      (void)pc.build();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("protocol: ") + e.what());
    }
    if (c.dimension && *c.dimension != pc.h0.dim()) throw ConfigError("protocol dimension disagrees with dimension");
    c.protocol = std::move(pc);
  }

  if (j.contains("shell")) {
    const Json& s = j["shell"];
    check_keys(s, {"energy", "width"}, "shell");
    EnergyShell sh;
    if (s.contains("energy")) sh.energy = number(s["energy"], "shell.energy");
    if (!s.contains("width")) throw ConfigError("shell needs width");
    sh.width = number(s["width"], "shell.width");
    if (!(sh.width > 0.0)) throw ConfigError("shell.width must be positive");
    c.shell = sh;
  }

  if (j.contains("energies")) c.energies = grid(j["energies"], "energies");

  if (j.contains("section")) {
    const Json& s = j["section"];
    check_keys(s, {"a", "t"}, "section");
    if (!s.contains("a") || !s.contains("t")) throw ConfigError("section needs a and t");
    c.section = SimplexSection{number_list(s["a"], "section.a"), number(s["t"], "section.t")};
  }

  if (j.contains("axis")) c.axis = axis(j["axis"]);
  if (j.contains("observable")) {
    c.observable = operator_spec(j["observable"], "observable").first;
    if (c.dimension && c.observable->dim() != *c.dimension) {
      throw ConfigError("observable dimension disagrees with the hamiltonian");
    }
  }
  if (j.contains("method")) {
    try {
      c.method = parse_geo_method(string(j["method"], "method"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("estimator")) {
    c.estimator = string(j["estimator"], "estimator");
    static const std::vector<std::string> valid{"partition", "observable", "shell", "canonical"};
    if (std::find(valid.begin(), valid.end(), c.estimator) == valid.end()) {
      throw ConfigError("estimator: expected one of " + join(valid));
    }
  }

  if (j.contains("firstlaw")) {
    const Json& f = j["firstlaw"];
    check_keys(f, {"lambda0", "dlambda", "halvings"}, "firstlaw");
    if (f.contains("lambda0")) c.firstlaw.lambda0 = number(f["lambda0"], "firstlaw.lambda0");
    if (f.contains("dlambda")) c.firstlaw.dlambda = number(f["dlambda"], "firstlaw.dlambda");
    if (f.contains("halvings")) c.firstlaw.halvings = unsigned_integer(f["halvings"], "firstlaw.halvings");
    if (!(c.firstlaw.dlambda > 0.0)) throw ConfigError("firstlaw.dlambda must be positive");
    if (c.firstlaw.halvings > 30) throw ConfigError("firstlaw.halvings must be <= 30");
  }

  if (j.contains("bipartite")) {
    const Json& b = j["bipartite"];
    check_keys(b, {"psi"}, "bipartite");
    if (!b.contains("psi")) throw ConfigError("bipartite needs psi (d_A x d_B amplitude matrix)");
    c.bipartite_psi = matrix(b["psi"], "bipartite.psi");
  }

  if (j.contains("output")) {
    const Json& o = j["output"];
    check_keys(o, {"format", "path"}, "output");
    if (o.contains("format")) {
      const std::string f = string(o["format"], "output.format");
      if (f == "csv") {
        c.format = Format::csv;
      } else if (f == "json") {
        c.format = Format::json;
      } else {
        throw ConfigError("output.format: expected csv | json");
      }
    }
    if (o.contains("path")) c.out_path = string(o["path"], "output.path");
  }
  return c;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace gqt::cli
