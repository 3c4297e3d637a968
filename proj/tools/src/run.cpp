#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gqt_cli/cli.hpp"

#ifndef GQT_VERSION
#define GQT_VERSION "0.0.0"
#endif

namespace gqt::cli {

namespace {

// What a command produces: metadata plus an ordered list of rows (or a single
// object for report-style commands).
struct Document {
  Json meta = Json::object();
  Json data;                             // array of row objects, or an object
  std::vector<std::string> csv_columns;  // empty: keys of the first row
  bool meta_comment = false;             // prefix CSV with "# {meta}"
  Format default_format = Format::csv;
};

struct Context {
  const RunConfig& cfg;
  std::ostream& err;
  bool quiet;

  void note(const std::string& msg) const {
    if (!quiet) err << "gqt: " << msg << "\n";
  }
};

std::string csv_cell(const Json& v) {
  switch (v.type()) {
    case Json::value_t::number_float:
      return format_double(v.get<double>());
    case Json::value_t::null:
      return "nan";
    case Json::value_t::boolean:
      return v.get<bool>() ? "true" : "false";
    case Json::value_t::string: {
      const std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    }
    default:
      return v.dump();
  }
}

std::string render_csv(const Document& doc) {
  std::ostringstream out;
  if (doc.meta_comment) out << "# " << dump_json(doc.meta, 0) << "\n";
  const Json rows = doc.data.is_array() ? doc.data : Json::array({doc.data});
  std::vector<std::string> cols = doc.csv_columns;
  if (cols.empty() && !rows.empty()) {
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it) cols.push_back(it.key());
  }
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << (k ? "," : "") << (row.contains(cols[k]) ? csv_cell(row[cols[k]]) : "");
    }
    out << "\n";
  }
  return out.str();
}

std::string render_json(const Document& doc) {
  Json j = Json::object();
  j["meta"] = doc.meta;
  j["data"] = doc.data;
  return dump_json(j, 2) + "\n";
}

Json base_meta(const std::string& command, const RunConfig& cfg) {
  Json m = Json::object();
  m["command"] = command;
  m["version"] = GQT_VERSION;
  if (cfg.dimension) {
    m["dimension"] = *cfg.dimension;
    m["hamiltonian"] = to_json(cfg.hamiltonian_or_default().matrix());
    m["hamiltonian_spec"] = cfg.hamiltonian_spec;
  }
  m["convention"] = to_string(cfg.convention);
  return m;
}

void add_sampler_meta(Json& m, const SamplerConfig& s) {
  m["seed"] = s.seed;
  m["samples"] = s.n_samples;
  m["streams"] = s.n_streams;
}

HamiltonianSystem require_system(const RunConfig& cfg, const std::string& command) {
  if (!cfg.dimension) throw ConfigError(command + " needs a hamiltonian (or dimension)");
  return HamiltonianSystem(cfg.hamiltonian_or_default());
}

std::vector<double> require_betas(const RunConfig& cfg, const std::string& command) {
  auto b = cfg.betas();
  if (b.empty()) throw ConfigError(command + " needs beta or beta_grid");
  return b;
}

double require_beta(const RunConfig& cfg, const std::string& command) {
  if (!cfg.beta) throw ConfigError(command + " needs a single beta");
  return *cfg.beta;
}

std::vector<double> require_energies(const RunConfig& cfg, const std::string& command) {
  if (!cfg.energies.empty()) return cfg.energies;
  if (cfg.shell) return {cfg.shell->energy};
  throw ConfigError(command + " needs energies (or a shell)");
}

Document cmd_volume(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  Document doc;
  doc.meta = base_meta("volume", cfg);
  if (cfg.section) {
    doc.data = Json::array({Json{{"n", cfg.section->a.size()},
                                 {"t", cfg.section->t},
                                 {"volume", simplex_section_volume(*cfg.section)},
                                 {"area", simplex_section_area(*cfg.section)}}});
    return doc;
  }
  const HamiltonianSystem sys = require_system(cfg, "volume");
  const double width = cfg.shell ? cfg.shell->width : 1e-2 * sys.spread();
  doc.meta["width"] = width;
  Json rows = Json::array();
  for (double e : require_energies(cfg, "volume")) {
    const EnergyShell shell{e, width};
    const ClampedShell cs = clamp_shell(sys, shell);
    if (cs.clamped) ctx.note("shell at " + format_double(e) + " clamped to the spectrum");
    if (cs.wide) ctx.note("shell width exceeds 10% of the spectral spread");
    const Entropy s = statistical_entropy(sys, shell, cfg.convention);
    rows.push_back(Json{{"energy", e},
                        {"volume", cumulative_volume(sys, e, cfg.convention)},
                        {"omega", density_of_states(sys, e, cfg.convention)},
                        {"weight", microcanonical_weight(sys, shell, cfg.convention)},
                        {"entropy", s.value}});
  }
  doc.data = std::move(rows);
  return doc;
}

Document cmd_dos(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const HamiltonianSystem sys = require_system(cfg, "dos");
  Document doc;
  doc.meta = base_meta("dos", cfg);
  Json rows = Json::array();
  for (double e : require_energies(cfg, "dos")) {
    rows.push_back(Json{{"energy", e}, {"omega", density_of_states(sys, e, cfg.convention)}});
  }
  doc.data = std::move(rows);
  return doc;
}

Document cmd_partition(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const HamiltonianSystem sys = require_system(cfg, "partition");
  Document doc;
  doc.meta = base_meta("partition", cfg);
  doc.default_format = Format::json;
  Json rows = Json::array();
  for (double b : require_betas(cfg, "partition")) {
    const double lq = log_partition_function(sys, b, cfg.convention);
    rows.push_back(Json{{"beta", b}, {"Q", std::exp(lq)}, {"log_Q", lq}});
  }
  doc.data = std::move(rows);
  return doc;
}

Document cmd_thermo(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const HamiltonianSystem sys = require_system(cfg, "thermo");
  Document doc;
  doc.meta = base_meta("thermo", cfg);
  doc.csv_columns = {"beta", "Q", "F", "U", "Hq", "var_h"};
  Json rows = Json::array();
  for (double b : require_betas(cfg, "thermo")) {
    const ThermoReport r = thermo_report(sys, b, cfg.convention);
    Json row{{"beta", b}};
    const Json fields = to_json(r);
    for (auto it = fields.begin(); it != fields.end(); ++it) row[it.key()] = it.value();
    rows.push_back(std::move(row));
  }
  doc.data = std::move(rows);
  return doc;
}

Document cmd_sample(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const HamiltonianSystem sys = require_system(cfg, "sample");
  Document doc;
  doc.meta = base_meta("sample", cfg);
  doc.meta["estimator"] = cfg.estimator;
  add_sampler_meta(doc.meta, cfg.sampler);
  doc.default_format = Format::json;
  McEstimate est;
  if (cfg.estimator == "shell") {
    if (!cfg.shell) throw ConfigError("sample with estimator shell needs a shell");
    est = mc_shell_volume(sys, *cfg.shell, cfg.sampler, cfg.convention);
  } else {
    const double beta = require_beta(cfg, "sample");
    doc.meta["beta"] = beta;
    if (cfg.estimator == "partition") {
      est = mc_partition_estimate(sys, beta, cfg.sampler, cfg.convention);
    } else if (cfg.estimator == "observable") {
      if (!cfg.observable) throw ConfigError("sample with estimator observable needs an observable");
      est = mc_observable_estimate(sys, *cfg.observable, beta, cfg.sampler);
    } else {
      // Mean energy over rejection samples from the canonical ensemble.
      const CanonicalBatch batch = sample_canonical(sys, beta, cfg.sampler);
      if (batch.low_acceptance) ctx.note("acceptance below 1e-6; prefer estimator partition/observable");
      const HermitianObservable& h = sys.observable();
      double mean = 0.0, m2 = 0.0;
      std::size_t n = 0;
      for (const auto& s : batch.states) {
        const double x = expectation(h, s);
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
      }
      est.value = mean;
      est.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
      est.n = n;
      est.acceptance_rate = batch.acceptance_rate;
    }
  }
  doc.data = to_json(est);
  return doc;
}

Document cmd_jarzynski(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (!cfg.protocol) throw ConfigError("jarzynski needs a protocol");
  const double beta = require_beta(cfg, "jarzynski");
  const ProtocolConfig& pc = *cfg.protocol;
  Document doc;
  doc.meta = base_meta("jarzynski", cfg);
  doc.meta["beta"] = beta;
  doc.meta["schedule"] = to_string(pc.shape);
  doc.meta["lambda_i"] = pc.lambda_i;
  doc.meta["lambda_f"] = pc.lambda_f;
  doc.meta["duration"] = pc.duration;
  doc.meta["n_steps"] = pc.n_steps;
  add_sampler_meta(doc.meta, cfg.sampler);
  doc.default_format = Format::json;
  const JarzynskiReport r = jarzynski_experiment(pc.build(), beta, cfg.sampler);
  if (!r.second_law_holds) ctx.note("<W> fell below dF by more than 3 standard errors");
  if (pc.work_csv) {
    std::ostringstream w;
    w << "trajectory,work\n";
    for (std::size_t k = 0; k < r.works.size(); ++k) w << k << "," << format_double(r.works[k]) << "\n";
    write_atomic(*pc.work_csv, w.str());
  }
  doc.data = to_json(r);
  return doc;
}

Document cmd_firstlaw(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (!cfg.protocol) throw ConfigError("firstlaw needs a protocol (h0 and v)");
  const HamiltonianFamily family{cfg.protocol->h0, cfg.protocol->v};
  Document doc;
  doc.meta = base_meta("firstlaw", cfg);
  doc.meta["lambda0"] = cfg.firstlaw.lambda0;
  Json rows = Json::array();
  for (double b : require_betas(cfg, "firstlaw")) {
    double d = cfg.firstlaw.dlambda;
    for (std::size_t h = 0; h <= cfg.firstlaw.halvings; ++h, d /= 2) {
      const FirstLawReport r = first_law_check(family, b, cfg.firstlaw.lambda0, d);
      Json row{{"beta", b}, {"delta_lambda", d}};
      const Json fields = to_json(r);
    for (auto it = fields.begin(); it != fields.end(); ++it) row[it.key()] = it.value();
      rows.push_back(std::move(row));
    }
  }
  doc.data = std::move(rows);
  return doc;
}

Document cmd_sweep(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const HamiltonianSystem sys = require_system(cfg, "sweep");
  if (!cfg.observable && sys.dim() != 2) throw ConfigError("sweep needs an observable when D != 2");
  const HermitianObservable obs = cfg.observable ? *cfg.observable : cfg.axis.spin();
  Document doc;
  doc.meta = base_meta("sweep", cfg);
  doc.meta["axis"] = Json{{"theta", cfg.axis.theta}, {"phi", cfg.axis.phi}};
  doc.meta["observable"] = to_json(obs.matrix());
  doc.meta["method"] = to_string(cfg.method);
  add_sampler_meta(doc.meta, cfg.sampler);
  doc.meta_comment = true;
  const SweepResult res = thermal_sweep(sys, obs, require_betas(cfg, "sweep"), cfg.method, cfg.sampler);
  Json rows = Json::array();
  for (const auto& r : res.rows) {
    rows.push_back(Json{{"beta", r.beta},
                        {"gibbs_mean", r.gibbs_mean},
                        {"gibbs_std", r.gibbs_std},
                        {"geo_mean", r.geo_mean},
                        {"geo_std", r.geo_std},
                        {"geo_std_error", r.geo_std_error}});
  }
  doc.data = std::move(rows);
  return doc;
}

Document cmd_bipartite(const Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (!cfg.bipartite_psi) throw ConfigError("bipartite needs bipartite.psi");
  const CMatrix& psi = *cfg.bipartite_psi;
  const WeightedStateEnsemble ens = bipartite_geometric_state(psi);
  const CMatrix rho_geo = ensemble_density_matrix(ens);
  const CMatrix rho_a = partial_trace_b(psi);
  Document doc;
  doc.meta = base_meta("bipartite", cfg);
  doc.meta["d_A"] = psi.rows();
  doc.meta["d_B"] = psi.cols();
  doc.meta["max_abs_difference"] = (rho_geo - rho_a).cwiseAbs().maxCoeff();
  doc.default_format = Format::json;
  Json rows = Json::array();
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const auto& e = ens.entries()[k];
    Json row{{"index", k}, {"weight", e.weight}};
    for (std::size_t a = 0; a < e.state.dim(); ++a) {
      row["re_" + std::to_string(a)] = e.state[a].real();
      row["im_" + std::to_string(a)] = e.state[a].imag();
    }
    rows.push_back(std::move(row));
  }
  if (cfg.format.value_or(doc.default_format) == Format::json) {
    doc.data = Json{{"entries", to_json(ens)},
                    {"density_matrix", to_json(rho_geo)},
                    {"partial_trace", to_json(rho_a)}};
  } else {
    doc.data = std::move(rows);
  }
  return doc;
}

const std::vector<std::pair<std::string, std::string>>& subcommands() {
  static const std::vector<std::pair<std::string, std::string>> s{
      {"volume", "cumulative volume, density of states, shell weight and entropy over energies"},
      {"dos", "density of states over energies"},
      {"partition", "closed-form partition function over beta"},
      {"thermo", "Q, F, U, Hq and var_h over beta"},
      {"sample", "Monte Carlo estimate (estimator: partition | observable | shell | canonical)"},
      {"jarzynski", "driven-protocol work statistics against Q_f/Q_i"},
      {"firstlaw", "First Law finite-difference residuals"},
      {"sweep", "Gibbs vs geometric measurement statistics over a beta grid"},
      {"bipartite", "geometric state of subsystem A from a bipartite pure state"},
      {"print-config", "echo the merged configuration as JSON"}};
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric quantum thermodynamics on CP^{D-1}", args.empty() ? "gqt" : args[0]};
  app.set_version_flag("--version", GQT_VERSION);
  app.require_subcommand(1, 1);

  std::string config_path, out_path, format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim, samples, streams;
  std::optional<double> beta;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "sampler seed (overrides the config)");
  app.add_option("--out", out_path, "output file (written atomically); default stdout");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--quiet", quiet, "suppress diagnostics on stderr");
  app.add_option("--dim", dim, "dimension D (Hamiltonian defaults to diag(0..D-1))");
  app.add_option("--beta", beta, "inverse temperature (replaces beta/beta_grid)");
  app.add_option("--samples", samples, "number of Monte Carlo samples");
  app.add_option("--streams", streams, "number of parallel sampler streams");

  std::string chosen;
  for (const auto& [name, desc] : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  std::vector<std::string> argv_store(args.begin(), args.end());
  if (argv_store.empty()) argv_store.push_back("gqt");
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << GQT_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gqt: " << e.what() << "\n" << "run with --help for usage\n";
    return kConfigError;
  }

  try {
    Json source = config_path.empty() ? Json::object() : parse_config_text(read_file(config_path));
    if (!source.is_object()) throw ConfigError("config must be a JSON object");
    if (seed) source["sampler"]["seed"] = *seed;
    if (samples) source["sampler"]["samples"] = *samples;
    if (streams) source["sampler"]["streams"] = *streams;
    if (dim) source["dimension"] = *dim;
    if (beta) {
      source.erase("beta_grid");
      source["beta"] = *beta;
    }
    if (!format.empty()) source["output"]["format"] = format;
    if (!out_path.empty()) source["output"]["path"] = out_path;
    const RunConfig cfg = parse_config(source);
    const Context ctx{cfg, err, quiet};

    std::string text;
    if (chosen == "print-config") {
      text = dump_json(cfg.source, 2) + "\n";
    } else {
      static const std::map<std::string, std::function<Document(const Context&)>> table{
          {"volume", cmd_volume},       {"dos", cmd_dos},           {"partition", cmd_partition},
          {"thermo", cmd_thermo},       {"sample", cmd_sample},     {"jarzynski", cmd_jarzynski},
          {"firstlaw", cmd_firstlaw},   {"sweep", cmd_sweep},       {"bipartite", cmd_bipartite}};
      const Document doc = table.at(chosen)(ctx);
      text = cfg.format.value_or(doc.default_format) == Format::json ? render_json(doc) : render_csv(doc);
    }
    if (cfg.out_path) {
      write_atomic(*cfg.out_path, text);
      ctx.note("wrote " + *cfg.out_path);
    } else {
      out << text;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "gqt: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DegeneracyError& e) {
    err << "gqt: " << e.what() << "\n";
    return kDegenerate;
  } catch (const DomainError& e) {
    err << "gqt: invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "gqt: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace gqt::cli
