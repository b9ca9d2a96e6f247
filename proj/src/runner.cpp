#include "vnrg/runner.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vnrg/checkpoint.hpp"
#include "vnrg/error.hpp"
#include "vnrg/oracles.hpp"

namespace vnrg {

namespace fs = std::filesystem;

Mpo ModelConfig::build() const {
  return kind == Kind::Ising ? build_tilted_ising_mpo(ising) : build_siam_mpo(siam);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << field << ": " << msg;
    throw InvalidArgument(os.str());
  }

  void expect_map(const YAML::Node& node, const std::string& field, std::initializer_list<const char*> allowed) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const char* key, const std::string& prefix, T& out) const {
    const YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) return;
    const std::string field = prefix.empty() ? std::string(key) : prefix + "." + key;
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        const auto v = node.as<long long>();
        if (v < 0) fail(node, field, "must be nonnegative");
        out = static_cast<T>(v);
      } else {
        out = node.as<T>();
      }
    } catch (const YAML::BadConversion&) {
      fail(node, field, "cannot parse '" + node.Scalar() + "'");
    }
  }

  template <typename T>
  void read_optional(const YAML::Node& parent, const char* key, const std::string& prefix, std::optional<T>& out) const {
    const YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) return;
    T v{};
    read(parent, key, prefix, v);
    out = v;
  }

  /// Runs a model builder or validator and attaches the node's location to
  /// its error.
  template <typename Fn>
  void checked(const YAML::Node& node, const std::string& field, Fn&& fn) const {
    try {
      fn();
    } catch (const InvalidArgument& e) {
      fail(node, field, e.what());
    }
  }

 private:
  std::string source_;
};

WeightSpec::Kind parse_weight_kind(const ConfigReader& rd, const YAML::Node& node, const std::string& text) {
  if (text == "uniform") return WeightSpec::Kind::Uniform;
  if (text == "position") return WeightSpec::Kind::Position;
  if (text == "boltzmann") return WeightSpec::Kind::Boltzmann;
  rd.fail(node, "vnrg.weights", "expected uniform, position or boltzmann, got '" + text + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (methods.empty()) throw InvalidArgument("methods: at least one method is required");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& m = methods[i];
    if (m != "nrg" && m != "dmrg" && m != "vnrg") throw InvalidArgument("methods: unknown method '" + m + "'");
    if (m == "nrg" && i != 0) throw InvalidArgument("methods: nrg builds a state from scratch and must come first");
  }
  const Mpo mpo = model.build();
  if (nrg.D == 0) throw InvalidArgument("nrg.D must be positive");
  if (nrg.M && *nrg.M == 0) throw InvalidArgument("nrg.M must be positive");
  if (std::find(methods.begin(), methods.end(), "dmrg") != methods.end()) {
    std::size_t max_d = 0;
    for (auto d : mpo.physical_dims()) max_d = std::max(max_d, d);
    dmrg.validate(max_d);
  }
  vnrg.validate();
  if (vnrg_init != "nrg" && vnrg_init != "random") throw InvalidArgument("vnrg.init must be nrg or random");
  if ((nrg.sectors || vnrg.use_sectors) && !mpo.has_charges())
    throw InvalidArgument("sector mode needs a charge-conserving model (siam)");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ConfigReader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ": syntax error: " << e.msg;
    throw InvalidArgument(os.str());
  }
  if (!root.IsDefined() || root.IsNull()) throw InvalidArgument(source + ": empty config");
  rd.expect_map(root, "", {"version", "seed", "output_dir", "oracle", "model", "methods", "nrg", "dmrg", "vnrg"});

  ExperimentConfig cfg;
  int version = kConfigVersion;
  rd.read(root, "version", "", version);
  if (version != kConfigVersion)
    rd.fail(root["version"], "version", "unsupported config version " + std::to_string(version));
  rd.read(root, "seed", "", cfg.seed);
  rd.read(root, "output_dir", "", cfg.output_dir);
  rd.read(root, "oracle", "", cfg.oracle);

  const YAML::Node model = root["model"];
  if (!model.IsDefined()) rd.fail(root, "model", "missing model section");
  if (!model.IsMap()) rd.fail(model, "model", "expected a mapping");
  std::string kind;
  rd.read(model, "kind", "model", kind);
  if (kind == "ising") {
    rd.expect_map(model, "model", {"kind", "n", "hx", "hz"});
    cfg.model.kind = ModelConfig::Kind::Ising;
    rd.read(model, "n", "model", cfg.model.ising.n);
    rd.read(model, "hx", "model", cfg.model.ising.hx);
    rd.read(model, "hz", "model", cfg.model.ising.hz);
  } else if (kind == "siam") {
    rd.expect_map(model, "model", {"kind", "N", "lambda", "xi0", "eps_f", "U", "profile", "prefactors"});
    cfg.model.kind = ModelConfig::Kind::Siam;
    auto& p = cfg.model.siam;
    rd.read(model, "N", "model", p.N);
    rd.read(model, "lambda", "model", p.lambda);
    rd.read(model, "xi0", "model", p.xi0);
    rd.read(model, "eps_f", "model", p.eps_f);
    rd.read(model, "U", "model", p.U);
    std::string profile = "wilson";
    rd.read(model, "profile", "model", profile);
    if (profile == "wilson")
      p.profile = HoppingProfile::Wilson;
    else if (profile == "uniform")
      p.profile = HoppingProfile::Uniform;
    else
      rd.fail(model["profile"], "model.profile", "expected wilson or uniform");
    if (const auto pf = model["prefactors"]; pf.IsDefined()) {
      if (!pf.IsSequence()) rd.fail(pf, "model.prefactors", "expected a list");
      for (const auto& v : pf) {
        try {
          p.prefactors.push_back(v.as<double>());
        } catch (const YAML::BadConversion&) {
          rd.fail(v, "model.prefactors", "cannot parse '" + v.Scalar() + "'");
        }
      }
    }
  } else {
    rd.fail(model["kind"].IsDefined() ? model["kind"] : model, "model.kind", "expected ising or siam");
  }
  rd.checked(model, "model", [&] { cfg.model.build(); });

  const YAML::Node methods = root["methods"];
  if (!methods.IsDefined()) rd.fail(root, "methods", "missing method list");
  if (!methods.IsSequence()) rd.fail(methods, "methods", "expected a list");
  for (const auto& m : methods) cfg.methods.push_back(m.as<std::string>());
  rd.checked(methods, "methods", [&] {
    if (cfg.methods.empty()) throw InvalidArgument("at least one method is required");
  });

  if (const auto n = root["nrg"]; n.IsDefined()) {
    rd.expect_map(n, "nrg", {"D", "M", "sectors"});
    rd.read(n, "D", "nrg", cfg.nrg.D);
    rd.read_optional(n, "M", "nrg", cfg.nrg.M);
    rd.read(n, "sectors", "nrg", cfg.nrg.sectors);
  }
  if (const auto n = root["dmrg"]; n.IsDefined()) {
    rd.expect_map(n, "dmrg", {"M", "D", "sweeps", "sweep_tol", "eig_tol", "eig_max_iters"});
    rd.read(n, "M", "dmrg", cfg.dmrg.M);
    rd.read(n, "D", "dmrg", cfg.dmrg.D);
    rd.read(n, "sweeps", "dmrg", cfg.dmrg.sweeps);
    rd.read(n, "sweep_tol", "dmrg", cfg.dmrg.sweep_tol);
    rd.read(n, "eig_tol", "dmrg", cfg.dmrg.eig_tol);
    rd.read(n, "eig_max_iters", "dmrg", cfg.dmrg.eig_max_iters);
  }
  if (const auto n = root["vnrg"]; n.IsDefined()) {
    rd.expect_map(n, "vnrg", {"max_sweeps", "site_tol", "site_max_iters", "sweep_tol", "weights", "beta", "bond_tensor",
                              "sectors", "init", "D", "M", "eig_tol", "eig_max_iters"});
    auto& v = cfg.vnrg;
    rd.read(n, "max_sweeps", "vnrg", v.max_sweeps);
    rd.read(n, "site_tol", "vnrg", v.site_tol);
    rd.read(n, "site_max_iters", "vnrg", v.site_max_iters);
    rd.read(n, "sweep_tol", "vnrg", v.sweep_tol);
    std::string weights = "uniform";
    rd.read(n, "weights", "vnrg", weights);
    v.weight.kind = parse_weight_kind(rd, n["weights"], weights);
    rd.read(n, "beta", "vnrg", v.weight.beta);
    rd.read(n, "bond_tensor", "vnrg", v.optimize_bond_tensor);
    rd.read(n, "sectors", "vnrg", v.use_sectors);
    rd.read(n, "init", "vnrg", cfg.vnrg_init);
    rd.read(n, "D", "vnrg", v.D);
    rd.read(n, "M", "vnrg", v.M);
    rd.read(n, "eig_tol", "vnrg", v.eig_tol);
    rd.read(n, "eig_max_iters", "vnrg", v.eig_max_iters);
  }
  rd.checked(root, "config", [&] { cfg.validate(); });
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Oracles

std::vector<double> exact_levels(const ModelConfig& model, std::size_t count, std::string* oracle_name) {
  auto name = [&](const char* s) {
    if (oracle_name) *oracle_name = s;
  };
  if (model.kind == ModelConfig::Kind::Ising && model.ising.hx == 0.0) {
    name("free_fermion");
    const auto ff = oracle::free_fermion_transverse_ising(model.ising.n, model.ising.hz);
    return oracle::free_fermion_levels(ff, count);
  }
  if (model.kind == ModelConfig::Kind::Siam && model.siam.U == 0.0) {
    name("noninteracting_siam");
    return oracle::noninteracting_siam_spectrum(model.siam, count);
  }
  const Mpo mpo = model.build();
  double dim = 1.0;
  for (auto d : mpo.physical_dims()) dim *= static_cast<double>(d);
  if (dim > static_cast<double>(oracle::kDenseGuard))
    throw InvalidArgument("oracle: Hilbert space dimension " + format_real(dim) + " exceeds the dense limit of " +
                          std::to_string(oracle::kDenseGuard));
  name("dense");
  const Matrix h = model.kind == ModelConfig::Kind::Ising ? oracle::dense_tilted_ising(model.ising)
                                                          : oracle::dense_siam(model.siam);
  const auto spec = oracle::dense_spectrum(h);
  const auto take = std::min<std::size_t>(count, static_cast<std::size_t>(spec.energies.size()));
  return {spec.energies.data(), spec.energies.data() + take};
}

// ---------------------------------------------------------------------------
// Output

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kResultsHeader =
    "state_index,method,energy,variance,delta_e_exact,fidelity_bound,sector_nup,sector_ndn,stage_walltime_ms";

std::string results_comment() {
  return "# vnrg results schema " + std::to_string(kResultsSchemaVersion) +
         ": state_index = rank by energy within the stage; method = stage method; energy = <H>; "
         "variance = <H^2>-<H>^2; delta_e_exact = |energy - exact level of the same rank| (empty without oracle); "
         "fidelity_bound = 1 - sqrt(2) sqrt(variance) / gap (exact gaps with oracle); sector_nup, sector_ndn = particle "
         "numbers (empty without sectors); stage_walltime_ms = wall time of the stage";
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string vnrg_trace_csv(const std::vector<StageOutcome>& stages) {
  std::ostringstream os;
  os << "# vnrg audit trail: one row per optimization step; cost = weighted summed energy\n";
  os << "stage,sweep,site,bond,cost_before,cost_after,gradient_norm,iterations\n";
  for (std::size_t k = 0; k < stages.size(); ++k) {
    if (!stages[k].sweep_report) continue;
    for (const auto& v : stages[k].sweep_report->visits)
      os << k + 1 << ',' << v.sweep << ',' << v.site << ',' << (v.bond ? 1 : 0) << ',' << format_real(v.cost_before)
         << ',' << format_real(v.cost_after) << ',' << format_real(v.gradient_norm) << ',' << v.iterations << '\n';
  }
  return os.str();
}

std::string dmrg_trace_csv(const std::vector<StageOutcome>& stages) {
  std::ostringstream os;
  os << "# dmrg trace: one row per two-site window\n";
  os << "stage,sweep,window,energy_sum,discarded_weight,eig_iterations\n";
  for (std::size_t k = 0; k < stages.size(); ++k) {
    if (!stages[k].dmrg) continue;
    for (const auto& e : stages[k].dmrg->trace)
      os << k + 1 << ',' << e.sweep << ',' << e.window << ',' << format_real(e.energy_sum) << ','
         << format_real(e.discarded_weight) << ',' << e.eig_iterations << '\n';
  }
  return os.str();
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["version"] = kConfigVersion;
  j["seed"] = cfg.seed;
  j["oracle"] = cfg.oracle;
  j["methods"] = cfg.methods;
  if (cfg.model.kind == ModelConfig::Kind::Ising) {
    j["model"] = {{"kind", "ising"}, {"n", cfg.model.ising.n}, {"hx", cfg.model.ising.hx}, {"hz", cfg.model.ising.hz}};
  } else {
    const auto& p = cfg.model.siam;
    j["model"] = {{"kind", "siam"},   {"N", p.N},
                  {"lambda", p.lambda}, {"xi0", p.xi0},
                  {"eps_f", p.eps_f},   {"U", p.U},
                  {"profile", p.profile == HoppingProfile::Wilson ? "wilson" : "uniform"},
                  {"prefactors", p.prefactors}};
  }
  j["nrg"] = {{"D", cfg.nrg.D}, {"sectors", cfg.nrg.sectors}};
  if (cfg.nrg.M) j["nrg"]["M"] = *cfg.nrg.M;
  j["dmrg"] = {{"M", cfg.dmrg.M},
               {"D", cfg.dmrg.D},
               {"sweeps", cfg.dmrg.sweeps},
               {"sweep_tol", cfg.dmrg.sweep_tol},
               {"eig_tol", cfg.dmrg.eig_tol},
               {"eig_max_iters", cfg.dmrg.eig_max_iters}};
  const auto& v = cfg.vnrg;
  const char* wk = v.weight.kind == WeightSpec::Kind::Uniform    ? "uniform"
                   : v.weight.kind == WeightSpec::Kind::Position ? "position"
                                                                 : "boltzmann";
  j["vnrg"] = {{"max_sweeps", v.max_sweeps}, {"site_tol", v.site_tol},   {"site_max_iters", v.site_max_iters},
               {"sweep_tol", v.sweep_tol},   {"weights", wk},           {"beta", v.weight.beta},
               {"bond_tensor", v.optimize_bond_tensor}, {"sectors", v.use_sectors}, {"init", cfg.vnrg_init},
               {"D", v.D},                   {"M", v.M}};
  return j;
}

NrgMps initial_state(const Mpo& mpo, std::size_t D, std::optional<std::size_t> M,
                     bool sectors, std::vector<std::string>& warnings) {
  NrgOptions opt;
  opt.D = D;
  opt.max_states = M;
  opt.use_sectors = sectors;
  auto r = run_nrg(mpo, opt);
  for (auto& w : r.warnings) warnings.push_back(std::move(w));
  return std::move(r.state);
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << results_comment() << '\n' << kResultsHeader << '\n';
  for (const auto& r : rows) {
    os << r.state_index << ',' << r.method << ',' << format_real(r.energy) << ',' << format_real(r.variance) << ',';
    if (r.delta_e_exact) os << format_real(*r.delta_e_exact);
    os << ',' << format_real(r.fidelity_bound) << ',';
    if (r.sector) os << (*r.sector)[0];
    os << ',';
    if (r.sector) os << (*r.sector)[1];
    os << ',' << format_real(r.stage_walltime_ms) << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write) {
  cfg.validate();
  const auto started = std::chrono::system_clock::now();
  const Mpo mpo = cfg.model.build();
  ExperimentResult result;

  std::optional<NrgMps> current;
  for (const auto& method : cfg.methods) {
    StageOutcome stage;
    stage.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    if (method == "nrg") {
      NrgOptions opt;
      opt.D = cfg.nrg.D;
      opt.max_states = cfg.nrg.M;
      opt.use_sectors = cfg.nrg.sectors;
      auto r = run_nrg(mpo, opt);
      stage.state = std::move(r.state);
      stage.spectrum = std::move(r.spectrum);
      stage.warnings = std::move(r.warnings);
    } else if (method == "dmrg") {
      TargetConfig tc = cfg.dmrg;
      tc.seed = cfg.seed;
      const NrgMps start = current ? *current : initial_state(mpo, tc.D, tc.M, false, stage.warnings);
      auto r = dmrg_sweep(start, mpo, tc);
      stage.state = r.state;
      stage.spectrum = r.spectrum;
      stage.dmrg = std::move(r);
    } else {
      NrgMps start;
      if (current) {
        start = *current;
      } else if (cfg.vnrg_init == "random") {
        const std::size_t M = cfg.vnrg.M ? cfg.vnrg.M : cfg.vnrg.D;
        start = random_nrg_mps(mpo.physical_dims(), cfg.vnrg.D, M, cfg.seed);
      } else {
        const std::optional<std::size_t> M = cfg.vnrg.M ? std::optional<std::size_t>(cfg.vnrg.M) : std::nullopt;
        start = initial_state(mpo, cfg.vnrg.D, M, cfg.vnrg.use_sectors, stage.warnings);
      }
      auto r = sweep(std::move(start), mpo, cfg.vnrg);
      stage.state = std::move(r.state);
      stage.spectrum = std::move(r.spectrum);
      stage.sweep_report = std::move(r.report);
    }
    stage.walltime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    current = stage.state;
    result.stages.push_back(std::move(stage));
  }

  if (cfg.oracle) {
    std::size_t count = 0;
    for (const auto& s : result.stages) count = std::max(count, s.state.num_states());
    // One level beyond the states so the topmost state gets its true gap.
    ++count;
    result.exact = exact_levels(cfg.model, count, &result.oracle_name);
  }

  for (auto& stage : result.stages) {
    const std::vector<double>* exact = nullptr;
    if (result.exact && result.exact->size() >= stage.state.num_states()) exact = &*result.exact;
    stage.accuracy = accuracy_records(stage.state, mpo, exact);
    const auto charges = stage.state.state_charges();
    for (std::size_t k = 0; k < stage.accuracy.size(); ++k) {
      const auto& a = stage.accuracy[k];
      ResultRow row;
      row.state_index = k;
      row.method = stage.method;
      row.energy = a.energy;
      row.variance = a.variance;
      row.delta_e_exact = a.energy_error;
      row.fidelity_bound = a.fidelity_bound;
      if (!charges.empty()) row.sector = charges.at(a.state);
      row.stage_walltime_ms = stage.walltime_ms;
      result.rows.push_back(row);
    }
  }

  if (!write) return result;

  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / "results.csv", results_csv(result.rows));
  write_file(dir / "vnrg_trace.csv", vnrg_trace_csv(result.stages));
  write_file(dir / "dmrg_trace.csv", dmrg_trace_csv(result.stages));

  nlohmann::json meta;
  meta["schema_version"] = kResultsSchemaVersion;
  meta["started"] = iso_time(started);
  meta["config"] = config_json(cfg);
  if (cfg.oracle) meta["oracle"] = result.oracle_name;
  nlohmann::json stages = nlohmann::json::array();
  for (std::size_t k = 0; k < result.stages.size(); ++k) {
    const auto& s = result.stages[k];
    const std::string file = "stage" + std::to_string(k + 1) + "_" + s.method + ".vnrg";
    save_state(s.state, (dir / file).string());
    nlohmann::json js{{"method", s.method},
                      {"checkpoint", file},
                      {"walltime_ms", s.walltime_ms},
                      {"states", s.state.num_states()},
                      {"summed_energy", s.spectrum.sum()},
                      {"max_isometry_residual", max_isometry_residual(s.state)},
                      {"warnings", s.warnings}};
    if (s.sweep_report) {
      js["sweeps"] = s.sweep_report->sweeps;
      js["converged"] = s.sweep_report->converged;
      js["optimizer_iterations"] = s.sweep_report->optimizer_iterations;
    }
    if (s.dmrg) {
      js["sweeps"] = s.dmrg->sweeps;
      js["two_site_solves"] = s.dmrg->two_site_solves;
      js["max_discarded_weight"] = s.dmrg->max_discarded_weight;
    }
    stages.push_back(std::move(js));
  }
  meta["stages"] = std::move(stages);
  meta["finished"] = iso_time(std::chrono::system_clock::now());
  write_file(dir / "metadata.json", meta.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// CSV comparison

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

CsvTable parse_table(const std::string& text, const std::string& name) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty())
      t.header = split_row(line);
    else
      t.rows.push_back(split_row(line));
  }
  if (t.header.empty()) throw FormatError(name + ": no header row");
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.rows[i].size() != t.header.size())
      throw FormatError(name + ": row " + std::to_string(i + 1) + " has " + std::to_string(t.rows[i].size()) +
                        " cells, header has " + std::to_string(t.header.size()));
  return t;
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

CsvComparison compare_csv_text(const std::string& a, const std::string& b, double tol) {
  const CsvTable ta = parse_table(a, "first table");
  const CsvTable tb = parse_table(b, "second table");
  CsvComparison out;
  auto differ = [&](std::string msg) {
    out.equal = false;
    out.differences.push_back(std::move(msg));
  };
  if (ta.header != tb.header) {
    differ("headers differ");
    return out;
  }
  if (ta.rows.size() != tb.rows.size())
    differ("row counts differ: " + std::to_string(ta.rows.size()) + " vs " + std::to_string(tb.rows.size()));
  const auto skip = std::find(ta.header.begin(), ta.header.end(), "stage_walltime_ms") - ta.header.begin();
  const std::size_t rows = std::min(ta.rows.size(), tb.rows.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ta.header.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == skip) continue;
      const auto& x = ta.rows[r][c];
      const auto& y = tb.rows[r][c];
      if (x == y) continue;
      const auto nx = as_number(x);
      const auto ny = as_number(y);
      if (tol > 0 && nx && ny && std::abs(*nx - *ny) <= tol) continue;
      differ("row " + std::to_string(r + 1) + " column " + ta.header[c] + ": '" + x + "' vs '" + y + "'");
    }
  }
  return out;
}

CsvComparison compare_csv_files(const std::string& path_a, const std::string& path_b, double tol) {
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return compare_csv_text(slurp(path_a), slurp(path_b), tol);
}

}  // namespace vnrg
