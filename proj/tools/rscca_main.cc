// rscca: fit, simulate, and run the simulation studies from the shell.
//
// Every subcommand accepts --config <file.json>; flags given on the command
// line override the corresponding config keys.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rscca/csv_io.h"
#include "rscca/error.h"
#include "rscca/experiments.h"
#include "rscca/json_io.h"
#include "rscca/scca.h"
#include "rscca/simulation.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rscca {
namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json ParseJson(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed " + what + ": " + e.what());
  }
}

// Inline JSON when the text starts with '{', otherwise a file holding it.
json SpecArgument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return ParseJson(text, "spec JSON");
  return ParseJson(ReadText(text), "spec file '" + text + "'");
}

void RejectUnknownKeys(const json& cfg, const std::vector<std::string>& allowed,
                       const std::string& where) {
  if (!cfg.is_object()) throw InputError(where + " must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw InputError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
T Get(const json& cfg, const std::string& key, const T& fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
T Require(const json& cfg, const std::string& key, const std::string& why) {
  if (!cfg.contains(key)) throw InputError("missing " + why + " (--" + key + ")");
  return Get<T>(cfg, key, T{});
}

std::uint64_t RequireSeed(const json& cfg, const std::string& command) {
  if (!cfg.contains("seed")) throw InputError(command + " is stochastic and needs --seed");
  return Get<std::uint64_t>(cfg, "seed", 0);
}

AssociationSpec SpecOf(const json& value) { return SpecFromJson(value.dump()); }

std::vector<AssociationSpec> SpecsOf(const json& cfg, std::vector<AssociationSpec> fallback) {
  if (cfg.contains("specs")) {
    if (!cfg["specs"].is_array()) throw InputError("config key 'specs' must be an array");
    fallback.clear();
    for (const auto& s : cfg["specs"]) fallback.push_back(SpecOf(s));
  }
  if (cfg.contains("spec")) fallback = {SpecOf(cfg["spec"])};
  return fallback;
}

Grid GridOf(const std::string& text) {
  if (fs::exists(text)) return LoadGrid(text);
  if (text.find(':') != std::string::npos) return ParseGridSpec(text);
  throw InputError("grid '" + text + "' is neither a:b:m nor an existing file");
}

FitMethod MethodOf(const std::string& text) {
  if (text == "auto") return FitMethod::kAuto;
  if (text == "classical") return FitMethod::kClassical;
  if (text == "robust") return FitMethod::kRobust;
  throw InputError("unknown method '" + text + "' (auto, classical, robust)");
}

TailSpec TailOf(const json& j) {
  RejectUnknownKeys(j, {"kind", "df"}, "model.tail");
  TailSpec tail;
  const std::string kind = Get<std::string>(j, "kind", "gaussian");
  if (kind == "gaussian") {
    tail.kind = TailKind::kGaussian;
  } else if (kind == "student_t") {
    tail.kind = TailKind::kStudentT;
  } else {
    throw InputError("unknown tail kind '" + kind + "' (gaussian, student_t)");
  }
  tail.df = Get<double>(j, "df", tail.df);
  return tail;
}

ModelConfig ModelOf(const json& cfg) {
  ModelConfig m;
  if (!cfg.contains("model")) return m;
  const json& j = cfg["model"];
  RejectUnknownKeys(j, {"a", "b", "m", "generator_basis", "generator_d", "rho0", "spectrum", "leading", "tail"},
                    "model");
  m.a = Get<double>(j, "a", m.a);
  m.b = Get<double>(j, "b", m.b);
  m.m = Get<Index>(j, "m", m.m);
  if (j.contains("generator_basis")) m.generator_kind = ParseBasisKind(Get<std::string>(j, "generator_basis", ""));
  m.generator_d = Get<Index>(j, "generator_d", m.generator_d);
  m.rho0 = Get<double>(j, "rho0", m.rho0);
  m.spectrum = Get<std::vector<double>>(j, "spectrum", m.spectrum);
  m.leading = Get<Index>(j, "leading", m.leading);
  if (j.contains("tail")) m.tail = TailOf(j["tail"]);
  return m;
}

RobustOptions RobustOf(const json& cfg, RobustOptions o) {
  if (!cfg.contains("robust")) return o;
  const json& j = cfg["robust"];
  RejectUnknownKeys(j,
                    {"random_starts", "gain_tol", "max_sweeps", "max_evals_per_half",
                     "classical_start", "principal_start", "initial_step", "step_tol"},
                    "robust");
  o.random_starts = Get<int>(j, "random_starts", o.random_starts);
  o.gain_tol = Get<double>(j, "gain_tol", o.gain_tol);
  o.max_sweeps = Get<int>(j, "max_sweeps", o.max_sweeps);
  o.max_evals_per_half = Get<int>(j, "max_evals_per_half", o.max_evals_per_half);
  o.classical_start = Get<bool>(j, "classical_start", o.classical_start);
  o.principal_start = Get<bool>(j, "principal_start", o.principal_start);
  o.initial_step = Get<double>(j, "initial_step", o.initial_step);
  o.step_tol = Get<double>(j, "step_tol", o.step_tol);
  return o;
}

ContaminationKind ContaminationKindOf(const std::string& s) {
  if (s == "curve_replacement") return ContaminationKind::kCurveReplacement;
  if (s == "score_shift") return ContaminationKind::kScoreShift;
  throw InputError("unknown contamination kind '" + s + "'");
}

ContaminationTarget TargetOf(const std::string& s) {
  if (s == "x") return ContaminationTarget::kX;
  if (s == "y") return ContaminationTarget::kY;
  if (s == "both") return ContaminationTarget::kBoth;
  throw InputError("unknown contamination target '" + s + "' (x, y, both)");
}

fs::path OutDir(const json& cfg) {
  const fs::path out = Require<std::string>(cfg, "out", "output directory");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw InputError("cannot create output directory '" + out.string() + "': " + ec.message());
  return out;
}

struct FitInputs {
  BasisSystem basis;
  ObjectiveContext ctx;
};

FitInputs LoadFitInputs(const json& cfg, double tau) {
  const std::string x_path = Require<std::string>(cfg, "x", "X curves");
  const std::string y_path = Require<std::string>(cfg, "y", "Y curves");
  for (const auto& p : {x_path, y_path}) {
    if (!fs::exists(p)) throw InputError("input file '" + p + "' does not exist");
  }
  const Grid grid = GridOf(Require<std::string>(cfg, "grid", "grid"));
  const BasisKind kind = ParseBasisKind(Get<std::string>(cfg, "basis", "fourier"));
  const Index d = Require<Index>(cfg, "d", "basis dimension");
  BasisSystem basis = BuildBasis(kind, d, grid);
  const FunctionalSample x = LoadSample(x_path, grid);
  const FunctionalSample y = LoadSample(y_path, grid);
  if (x.n() != y.n()) {
    throw InputError("X has " + std::to_string(x.n()) + " rows but Y has " + std::to_string(y.n()) +
                     " rows");
  }
  const AssociationSpec spec = SpecsOf(cfg, {AssociationSpec{}}).front();
  ObjectiveContext ctx = MakeContext(ProjectSample(x, basis), ProjectSample(y, basis), basis, spec, tau, tau);
  return {std::move(basis), std::move(ctx)};
}

bool NeedsSeed(const ObjectiveContext& ctx, FitMethod method) {
  if (method == FitMethod::kClassical) return false;
  return method == FitMethod::kRobust || ctx.spec.kind != AssociationKind::kCovPearson;
}

const std::vector<std::string> kFitKeys{"x", "y", "grid", "basis", "d", "tau", "spec", "seed",
                                        "out", "method", "robust"};

int CmdFit(const json& cfg) {
  RejectUnknownKeys(cfg, kFitKeys, "fit config");
  const double tau = Get<double>(cfg, "tau", 0.0);
  const FitInputs in = LoadFitInputs(cfg, tau);
  const FitMethod method = MethodOf(Get<std::string>(cfg, "method", "auto"));
  RobustOptions opts = RobustOf(cfg, RobustOptions{});
  if (NeedsSeed(in.ctx, method)) opts.seed = RequireSeed(cfg, "a robust fit");
  const fs::path out = OutDir(cfg);

  const SccaFit fit = Fit(in.ctx, opts, method);
  WriteFileAtomic(out / "fit.json", FitToJson(fit, in.basis));
  WriteFileAtomic(out / "directions_x.csv", DirectionCsv(in.basis, fit.phi));
  WriteFileAtomic(out / "directions_y.csv", DirectionCsv(in.basis, fit.psi));
  std::cout << "lambda_hat=" << FormatDouble(fit.lambda_hat)
            << " assoc_unpenalized=" << FormatDouble(fit.assoc_unpenalized)
            << " spec=" << SpecToJson(fit.spec) << " tau=" << FormatDouble(tau)
            << " d=" << in.basis.dim() << "\n";
  return 0;
}

int CmdTauSelect(const json& cfg) {
  std::vector<std::string> keys = kFitKeys;
  keys.push_back("tau_grid");
  keys.push_back("folds");
  RejectUnknownKeys(cfg, keys, "tau-select config");
  const std::vector<double> grid = Require<std::vector<double>>(cfg, "tau_grid", "tau grid");
  const int folds = Get<int>(cfg, "folds", 5);
  const FitInputs in = LoadFitInputs(cfg, 0.0);
  const FitMethod method = MethodOf(Get<std::string>(cfg, "method", "auto"));
  RobustOptions opts = RobustOf(cfg, RobustOptions{});
  opts.seed = RequireSeed(cfg, "tau-select");
  const fs::path out = OutDir(cfg);

  const TauSelection sel = SelectTau(in.ctx, grid, folds, opts, method);
  WriteFileAtomic(out / "tau_selection.json", TauSelectionJson(sel, in.ctx.spec, folds, opts.seed));
  WriteFileAtomic(out / "tau_selection.csv", TauSelectionCsv(sel, in.ctx.spec));
  std::cout << "selected tau=" << FormatDouble(sel.tau) << " folds=" << folds
            << " spec=" << SpecToJson(in.ctx.spec) << " d=" << in.basis.dim() << "\n";
  return 0;
}

std::string SampleCsv(const FunctionalSample& s) {
  std::string out;
  for (Index i = 0; i < s.n(); ++i) {
    const VectorXd row = s.values().row(i).transpose();
    out += FormatCsvRow(std::vector<double>(row.data(), row.data() + row.size())) + "\n";
  }
  return out;
}

int CmdSimulate(const json& cfg) {
  RejectUnknownKeys(cfg, {"model", "n", "seed", "out", "eps", "contamination"}, "simulate config");
  const ModelConfig mc = ModelOf(cfg);
  const Index n = Require<Index>(cfg, "n", "sample size");
  const std::uint64_t seed = RequireSeed(cfg, "simulate");
  const ProcessModel model = BuildModel(mc);
  const fs::path out = OutDir(cfg);

  SamplePair data = SamplePairs(model, n, seed);
  ContaminationModel cont = DefaultContamination(model);
  bool contaminated = false;
  std::vector<Index> rows;
  if (cfg.contains("contamination")) {
    const json& c = cfg["contamination"];
    RejectUnknownKeys(c, {"fraction", "kind", "target", "magnitude", "shape_frequency"}, "contamination");
    cont.fraction = Get<double>(c, "fraction", cont.fraction);
    cont.kind = ContaminationKindOf(Get<std::string>(c, "kind", "curve_replacement"));
    cont.target = TargetOf(Get<std::string>(c, "target", "both"));
    cont.magnitude = Get<double>(c, "magnitude", cont.magnitude);
    cont.shape = SineShape(model.basis().grid(), Get<int>(c, "shape_frequency", 4));
    contaminated = true;
  }
  if (cfg.contains("eps")) {
    cont.fraction = Get<double>(cfg, "eps", 0.0);
    contaminated = true;
  }
  if (contaminated) {
    ContaminatedPair cp = Contaminate(data, cont, DeriveSeed(seed, 3, 0));
    data = std::move(cp.samples);
    rows = std::move(cp.rows);
  }

  std::string grid_csv;
  const VectorXd& t = model.basis().grid().points();
  for (Index k = 0; k < t.size(); ++k) grid_csv += FormatDouble(t[k]) + "\n";
  WriteFileAtomic(out / "x.csv", SampleCsv(data.x));
  WriteFileAtomic(out / "y.csv", SampleCsv(data.y));
  WriteFileAtomic(out / "grid.csv", grid_csv);
  WriteFileAtomic(out / "manifest.json",
                  ManifestJson(mc, model, n, seed, contaminated ? &cont : nullptr, rows));
  std::cout << "n=" << n << " lambda0=" << FormatDouble(model.lambda0())
            << " contaminated_rows=" << rows.size() << "\n";
  return 0;
}

void Report(const std::string& line) { std::cerr << line << "\n"; }

int CmdConsistency(const json& cfg) {
  RejectUnknownKeys(cfg,
                    {"model", "basis", "n_schedule", "tau_scale", "tau_exponent", "penalty_regime",
                     "d", "sieve_regime", "sieve_scale", "sieve_exponent", "spec", "specs", "reps",
                     "seed", "out", "robust", "discrepancy_dirs"},
                    "consistency config");
  ConsistencyConfig c;
  c.model = ModelOf(cfg);
  c.fit_kind = ParseBasisKind(Get<std::string>(cfg, "basis", "fourier"));
  c.n_schedule = Get<std::vector<Index>>(cfg, "n_schedule", c.n_schedule);
  c.tau_scale = Get<double>(cfg, "tau_scale", c.tau_scale);
  c.tau_exponent = Get<double>(cfg, "tau_exponent", c.tau_exponent);
  c.penalty_regime = Get<bool>(cfg, "penalty_regime", c.penalty_regime);
  c.penalty_d = Get<Index>(cfg, "d", c.penalty_d);
  c.sieve_regime = Get<bool>(cfg, "sieve_regime", c.sieve_regime);
  c.sieve_scale = Get<double>(cfg, "sieve_scale", c.sieve_scale);
  c.sieve_exponent = Get<double>(cfg, "sieve_exponent", c.sieve_exponent);
  c.specs = SpecsOf(cfg, c.specs);
  c.replicates = Get<int>(cfg, "reps", c.replicates);
  c.seed = RequireSeed(cfg, "consistency");
  c.robust = RobustOf(cfg, c.robust);
  c.discrepancy_dirs = Get<int>(cfg, "discrepancy_dirs", c.discrepancy_dirs);
  Validate(c);
  const fs::path out = OutDir(cfg);

  const ConsistencyReport report = RunConsistency(c, Report);
  WriteFileAtomic(out / "consistency_rows.csv", ConsistencyRowsCsv(report));
  WriteFileAtomic(out / "consistency_summary.csv", ConsistencySummaryCsv(report));
  WriteFileAtomic(out / "consistency_summary.json", ConsistencySummaryJson(report));
  WriteFileAtomic(out / "consistency.gp", ConsistencyGnuplot(report));
  std::cout << "cells=" << report.summaries.size() << " rows=" << report.rows.size()
            << " lambda0=" << FormatDouble(report.lambda0) << "\n";
  return 0;
}

int CmdRobustness(const json& cfg) {
  RejectUnknownKeys(cfg,
                    {"model", "basis", "d", "n", "tau_scale", "tau_exponent", "fractions",
                     "contamination", "spec", "specs", "reps", "seed", "out", "robust"},
                    "robustness config");
  RobustnessConfig c;
  c.model = ModelOf(cfg);
  c.fit_kind = ParseBasisKind(Get<std::string>(cfg, "basis", "fourier"));
  c.d = Get<Index>(cfg, "d", c.d);
  c.n = Get<Index>(cfg, "n", c.n);
  c.tau_scale = Get<double>(cfg, "tau_scale", c.tau_scale);
  c.tau_exponent = Get<double>(cfg, "tau_exponent", c.tau_exponent);
  c.fractions = Get<std::vector<double>>(cfg, "fractions", c.fractions);
  if (cfg.contains("contamination")) {
    const json& j = cfg["contamination"];
    RejectUnknownKeys(j, {"kind", "target", "magnitude", "shape_frequency"}, "contamination");
    c.kind = ContaminationKindOf(Get<std::string>(j, "kind", "curve_replacement"));
    c.target = TargetOf(Get<std::string>(j, "target", "both"));
    c.magnitude = Get<double>(j, "magnitude", c.magnitude);
    c.shape_frequency = Get<int>(j, "shape_frequency", c.shape_frequency);
  }
  c.specs = SpecsOf(cfg, DefaultRobustnessSpecs());
  c.replicates = Get<int>(cfg, "reps", c.replicates);
  c.seed = RequireSeed(cfg, "robustness");
  c.robust = RobustOf(cfg, c.robust);
  Validate(c);
  const fs::path out = OutDir(cfg);

  const RobustnessReport report = RunRobustness(c, Report);
  WriteFileAtomic(out / "robustness_rows.csv", RobustnessRowsCsv(report));
  WriteFileAtomic(out / "robustness_summary.csv", RobustnessSummaryCsv(report));
  WriteFileAtomic(out / "robustness_summary.json", RobustnessSummaryJson(report));
  WriteFileAtomic(out / "robustness.gp", RobustnessGnuplot(report));
  std::cout << "cells=" << report.summaries.size() << " rows=" << report.rows.size()
            << " lambda0=" << FormatDouble(report.lambda0) << "\n";
  return 0;
}

// Flag values, copied into the config only when given.
struct Flags {
  std::string config;
  std::string x, y, grid, basis, spec, out, method, tau_grid;
  double tau = 0.0;
  double eps = 0.0;
  long long d = 0;
  long long n = 0;
  int reps = 0;
  int folds = 0;
  std::uint64_t seed = 0;
};

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("cannot parse '" + item + "' in a comma-separated list");
    }
  }
  return out;
}

json MergeConfig(const CLI::App& sub, const Flags& f) {
  json cfg = json::object();
  if (!f.config.empty()) {
    cfg = ParseJson(ReadText(f.config), "config file '" + f.config + "'");
    if (!cfg.is_object()) throw InputError("config file must hold a JSON object");
  }
  auto given = [&](const char* name) {
    const CLI::Option* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--x")) cfg["x"] = f.x;
  if (given("--y")) cfg["y"] = f.y;
  if (given("--grid")) cfg["grid"] = f.grid;
  if (given("--basis")) cfg["basis"] = f.basis;
  if (given("--d")) cfg["d"] = f.d;
  if (given("--tau")) cfg["tau"] = f.tau;
  if (given("--tau-grid")) cfg["tau_grid"] = ParseList(f.tau_grid);
  if (given("--spec")) {
    cfg.erase("specs");
    cfg["spec"] = SpecArgument(f.spec);
  }
  if (given("--seed")) cfg["seed"] = f.seed;
  if (given("--reps")) cfg["reps"] = f.reps;
  if (given("--out")) cfg["out"] = f.out;
  if (given("--method")) cfg["method"] = f.method;
  if (given("--folds")) cfg["folds"] = f.folds;
  if (given("--n")) cfg["n"] = f.n;
  if (given("--eps")) cfg["eps"] = f.eps;
  return cfg;
}

int Run(int argc, char** argv) {
  CLI::App app{"Smoothed robust canonical correlation analysis for paired functional data"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config; flags override its keys");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.out, "output directory");
  };
  auto fit_flags = [&](CLI::App* sub) {
    sub->add_option("--x", f.x, "X curves, one per row");
    sub->add_option("--y", f.y, "Y curves, one per row");
    sub->add_option("--grid", f.grid, "a:b:m or a single-column CSV of abscissae");
    sub->add_option("--basis", f.basis, "fourier or bspline");
    sub->add_option("--d", f.d, "basis dimension");
    sub->add_option("--spec", f.spec, "association spec as JSON or a path to it");
    sub->add_option("--method", f.method, "auto, classical or robust");
  };

  CLI::App* fit = app.add_subcommand("fit", "fit the first canonical pair");
  common(fit);
  fit_flags(fit);
  fit->add_option("--tau", f.tau, "smoothing parameter for both blocks");

  CLI::App* tau = app.add_subcommand("tau-select", "choose tau by K-fold cross-validation");
  common(tau);
  fit_flags(tau);
  tau->add_option("--tau-grid", f.tau_grid, "comma-separated tau values");
  tau->add_option("--folds", f.folds, "number of folds (default 5)");

  CLI::App* sim = app.add_subcommand("simulate", "draw paired curves from the canonical model");
  common(sim);
  sim->add_option("--n", f.n, "number of curve pairs");
  sim->add_option("--eps", f.eps, "contamination fraction (default contamination model)");

  CLI::App* cons = app.add_subcommand("consistency", "consistency study over an n schedule");
  common(cons);
  cons->add_option("--basis", f.basis, "fitting basis");
  cons->add_option("--d", f.d, "basis dimension of the penalty-only regime");
  cons->add_option("--spec", f.spec, "association spec as JSON or a path to it");
  cons->add_option("--reps", f.reps, "replicates per cell");

  CLI::App* rob = app.add_subcommand("robustness", "contamination study, classical vs robust");
  common(rob);
  rob->add_option("--basis", f.basis, "fitting basis");
  rob->add_option("--d", f.d, "basis dimension");
  rob->add_option("--n", f.n, "sample size");
  rob->add_option("--spec", f.spec, "single association spec (default: classical, gk, m-scatter)");
  rob->add_option("--reps", f.reps, "paired replicates per fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (fit->parsed()) return CmdFit(MergeConfig(*fit, f));
    if (tau->parsed()) return CmdTauSelect(MergeConfig(*tau, f));
    if (sim->parsed()) return CmdSimulate(MergeConfig(*sim, f));
    if (cons->parsed()) return CmdConsistency(MergeConfig(*cons, f));
    if (rob->parsed()) return CmdRobustness(MergeConfig(*rob, f));
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace
}  // namespace rscca

int main(int argc, char** argv) { return rscca::Run(argc, argv); }
