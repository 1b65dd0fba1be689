#include "rscca/json_io.h"

#include <sstream>

#include <json.hpp>

#include "rscca/csv_io.h"
#include "rscca/error.h"

namespace rscca {
namespace {

using nlohmann::ordered_json;

ordered_json VectorJson(const VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ordered_json SpecObject(const AssociationSpec& spec) {
  ordered_json out;
  out["kind"] = std::string(ToString(spec.kind));
  if (spec.kind == AssociationKind::kCovPearson) return out;
  if (spec.kind == AssociationKind::kMScatter) {
    out["quantile"] = spec.scatter.quantile;
    out["max_iter"] = spec.scatter.max_iter;
    out["tol"] = spec.scatter.tol;
    return out;
  }
  ordered_json scale;
  scale["kind"] = std::string(ToString(spec.scale.kind));
  if (spec.scale.kind == ScaleKind::kMad) scale["c"] = spec.scale.mad_c;
  if (spec.scale.kind == ScaleKind::kMScale) {
    scale["tuning"] = spec.scale.mscale_tuning;
    scale["b"] = spec.scale.mscale_b;
  }
  out["scale"] = scale;
  return out;
}

double NumberField(const ordered_json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw InputError(std::string("spec field '") + key + "' must be a number");
  return obj[key].get<double>();
}

void RejectUnknown(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                   std::string_view where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) throw InputError("unknown key '" + it.key() + "' in " + std::string(where));
  }
}

AssociationSpec SpecFromObject(const ordered_json& obj) {
  if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string()) {
    throw InputError("spec must be an object with a string 'kind'");
  }
  RejectUnknown(obj, {"kind", "scale", "quantile", "max_iter", "tol"}, "spec");
  AssociationSpec spec;
  spec.kind = ParseAssociationKind(obj["kind"].get<std::string>());
  spec.scatter.quantile = NumberField(obj, "quantile", spec.scatter.quantile);
  spec.scatter.max_iter = static_cast<int>(NumberField(obj, "max_iter", spec.scatter.max_iter));
  spec.scatter.tol = NumberField(obj, "tol", spec.scatter.tol);
  if (obj.contains("scale")) {
    const ordered_json& s = obj["scale"];
    if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
      throw InputError("spec scale must be an object with a string 'kind'");
    }
    RejectUnknown(s, {"kind", "c", "tuning", "b"}, "spec scale");
    spec.scale.kind = ParseScaleKind(s["kind"].get<std::string>());
    spec.scale.mad_c = NumberField(s, "c", spec.scale.mad_c);
    spec.scale.mscale_tuning = NumberField(s, "tuning", spec.scale.mscale_tuning);
    spec.scale.mscale_b = NumberField(s, "b", spec.scale.mscale_b);
  }
  Validate(spec);
  return spec;
}

ordered_json DirectionJson(const Direction& d) {
  ordered_json out;
  out["convention"] = d.convention == NormConvention::kL2Unit ? "l2_unit" : "penalized_unit";
  out["coef"] = VectorJson(d.coef);
  return out;
}

std::string Dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json SummaryJson(const Summary& s) {
  ordered_json out;
  out["median"] = s.median;
  out["q1"] = s.q1;
  out["q3"] = s.q3;
  out["count"] = s.count;
  return out;
}

std::string Num(double v) { return FormatDouble(v); }

ordered_json ModelJson(const ModelConfig& c) {
  ordered_json out;
  out["grid"] = {{"a", c.a}, {"b", c.b}, {"m", c.m}};
  out["generator_basis"] = std::string(ToString(c.generator_kind));
  out["generator_d"] = c.generator_d;
  out["rho0"] = c.rho0;
  out["spectrum"] = c.spectrum;
  out["leading"] = c.leading;
  out["tail"] = {{"kind", c.tail.kind == TailKind::kGaussian ? "gaussian" : "student_t"},
                 {"df", c.tail.df}};
  return out;
}

ordered_json RobustJson(const RobustOptions& o) {
  ordered_json out;
  out["random_starts"] = o.random_starts;
  out["gain_tol"] = o.gain_tol;
  out["max_sweeps"] = o.max_sweeps;
  out["max_evals_per_half"] = o.max_evals_per_half;
  out["classical_start"] = o.classical_start;
  out["principal_start"] = o.principal_start;
  out["initial_step"] = o.initial_step;
  out["step_tol"] = o.step_tol;
  return out;
}

std::string ContaminationKindName(ContaminationKind k) {
  return k == ContaminationKind::kCurveReplacement ? "curve_replacement" : "score_shift";
}

std::string TargetName(ContaminationTarget t) {
  switch (t) {
    case ContaminationTarget::kX: return "x";
    case ContaminationTarget::kY: return "y";
    case ContaminationTarget::kBoth: return "both";
  }
  return "both";
}

}  // namespace

std::string CsvField(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string SpecToJson(const AssociationSpec& spec) { return SpecObject(spec).dump(); }

AssociationSpec SpecFromJson(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed spec JSON: ") + e.what());
  }
  return SpecFromObject(j);
}

std::string FitToJson(const SccaFit& fit, const BasisSystem& basis) {
  ordered_json j;
  j["method"] = fit.method;
  j["lambda_hat"] = fit.lambda_hat;
  j["assoc_unpenalized"] = fit.assoc_unpenalized;
  j["spec"] = SpecObject(fit.spec);
  j["smoothing"] = {{"tau_x", fit.smoothing.tau_x}, {"tau_y", fit.smoothing.tau_y}, {"d", fit.smoothing.d}};
  j["seed"] = fit.seed;
  j["basis"] = {{"kind", std::string(ToString(basis.kind()))},
                {"d", basis.dim()},
                {"grid", {{"a", basis.grid().lower()}, {"b", basis.grid().upper()}, {"m", basis.grid().size()}}}};
  j["phi"] = DirectionJson(fit.phi);
  j["psi"] = DirectionJson(fit.psi);
  j["phi_penalized_unit"] = DirectionJson(fit.phi_penalized_unit);
  j["psi_penalized_unit"] = DirectionJson(fit.psi_penalized_unit);
  ordered_json restarts = ordered_json::array();
  for (const RestartRecord& r : fit.trace.restarts) {
    ordered_json rj;
    rj["origin"] = r.origin;
    rj["start_objective"] = r.start_objective;
    rj["final_objective"] = r.final_objective;
    rj["sweeps"] = r.sweep_objective.size();
    rj["evaluations"] = r.evaluations;
    rj["degenerate"] = r.degenerate;
    restarts.push_back(rj);
  }
  j["trace"] = {{"best_restart", fit.trace.best_restart}, {"restarts", restarts}};
  return Dump(j);
}

std::string DirectionCsv(const BasisSystem& basis, const Direction& direction) {
  const VectorXd curve = EvaluateCurve(basis, direction.coef);
  const VectorXd& t = basis.grid().points();
  std::string out = "t,value\n";
  for (Index k = 0; k < t.size(); ++k) out += FormatCsvRow({t[k], curve[k]}) + "\n";
  return out;
}

std::string ManifestJson(const ModelConfig& config, const ProcessModel& model, Index n,
                         std::uint64_t seed, const ContaminationModel* contamination,
                         const std::vector<Index>& contaminated_rows) {
  ordered_json j;
  j["model"] = ModelJson(config);
  j["n"] = n;
  j["seed"] = seed;
  j["rho0"] = model.rho0();
  j["lambda0"] = model.lambda0();
  j["components"] = model.components();
  j["true_phi"] = VectorJson(model.true_phi());
  j["true_psi"] = VectorJson(model.true_psi());
  if (contamination != nullptr) {
    j["contamination"] = {{"fraction", contamination->fraction},
                          {"kind", ContaminationKindName(contamination->kind)},
                          {"target", TargetName(contamination->target)},
                          {"magnitude", contamination->magnitude},
                          {"rows", contaminated_rows}};
  }
  j["files"] = {{"x", "x.csv"}, {"y", "y.csv"}, {"grid", "grid.csv"}};
  return Dump(j);
}

std::string TauSelectionJson(const TauSelection& selection, const AssociationSpec& spec, int folds,
                             std::uint64_t seed) {
  ordered_json j;
  j["tau"] = selection.tau;
  j["folds"] = folds;
  j["seed"] = seed;
  j["spec"] = SpecObject(spec);
  ordered_json table = ordered_json::array();
  for (const TauCell& c : selection.table) {
    table.push_back({{"tau", c.tau},
                     {"mean_heldout", c.mean_heldout},
                     {"failed_folds", c.failed_folds},
                     {"usable", c.usable},
                     {"heldout", c.heldout}});
  }
  j["table"] = table;
  return Dump(j);
}

std::string TauSelectionCsv(const TauSelection& selection, const AssociationSpec& spec) {
  const std::string echo = CsvField(SpecToJson(spec));
  std::string out = "tau,mean_heldout,failed_folds,usable,selected,spec\n";
  for (const TauCell& c : selection.table) {
    out += Num(c.tau) + "," + Num(c.mean_heldout) + "," + std::to_string(c.failed_folds) + "," +
           (c.usable ? "1" : "0") + "," + (c.tau == selection.tau ? "1" : "0") + "," + echo + "\n";
  }
  return out;
}

std::string ConsistencyRowsCsv(const ConsistencyReport& report) {
  std::string out =
      "regime,n,tau,d,spec_index,replicate,seed,ok,lambda_hat,lambda_err,lx,ly,angle_x,angle_y,"
      "tau_psi_proj,c_x,c_y,c_xy,message,spec\n";
  for (const ConsistencyRow& r : report.rows) {
    out += r.regime + "," + std::to_string(r.n) + "," + Num(r.tau) + "," + std::to_string(r.d) +
           "," + std::to_string(r.spec_index) + "," + std::to_string(r.replicate) + "," +
           std::to_string(r.seed) + "," + (r.ok ? "1" : "0") + "," + Num(r.lambda_hat) + "," +
           Num(r.lambda_err) + "," + Num(r.lx) + "," + Num(r.ly) + "," + Num(r.angle_x) + "," +
           Num(r.angle_y) + "," + Num(r.tau_psi_proj) + "," + Num(r.c_x) + "," + Num(r.c_y) +
           "," + Num(r.c_xy) + "," + CsvField(r.message) + "," +
           CsvField(SpecToJson(report.config.specs[static_cast<size_t>(r.spec_index)])) + "\n";
  }
  return out;
}

std::string ConsistencySummaryCsv(const ConsistencyReport& report) {
  std::string out =
      "regime,n,tau,d,spec_index,count,failures,lx_median,lx_q1,lx_q3,ly_median,ly_q1,ly_q3,"
      "lambda_err_median,lambda_err_q1,lambda_err_q3,angle_x_median,angle_y_median,c_x_median,"
      "tau_psi_proj,spec\n";
  for (const ConsistencySummary& s : report.summaries) {
    out += s.regime + "," + std::to_string(s.n) + "," + Num(s.tau) + "," + std::to_string(s.d) +
           "," + std::to_string(s.spec_index) + "," + std::to_string(s.lx.count) + "," +
           std::to_string(s.failures) + "," + Num(s.lx.median) + "," + Num(s.lx.q1) + "," +
           Num(s.lx.q3) + "," + Num(s.ly.median) + "," + Num(s.ly.q1) + "," + Num(s.ly.q3) + "," +
           Num(s.lambda_err.median) + "," + Num(s.lambda_err.q1) + "," + Num(s.lambda_err.q3) +
           "," + Num(s.angle_x.median) + "," + Num(s.angle_y.median) + "," + Num(s.c_x.median) +
           "," + Num(s.tau_psi_proj) + "," +
           CsvField(SpecToJson(report.config.specs[static_cast<size_t>(s.spec_index)])) + "\n";
  }
  return out;
}

std::string ConsistencySummaryJson(const ConsistencyReport& report) {
  const ConsistencyConfig& c = report.config;
  ordered_json j;
  ordered_json cfg;
  cfg["model"] = ModelJson(c.model);
  cfg["fit_basis"] = std::string(ToString(c.fit_kind));
  cfg["n_schedule"] = c.n_schedule;
  cfg["tau_scale"] = c.tau_scale;
  cfg["tau_exponent"] = c.tau_exponent;
  cfg["penalty_regime"] = c.penalty_regime;
  cfg["penalty_d"] = c.penalty_d;
  cfg["sieve_regime"] = c.sieve_regime;
  cfg["sieve_scale"] = c.sieve_scale;
  cfg["sieve_exponent"] = c.sieve_exponent;
  ordered_json specs = ordered_json::array();
  for (const auto& s : c.specs) specs.push_back(SpecObject(s));
  cfg["specs"] = specs;
  cfg["replicates"] = c.replicates;
  cfg["seed"] = c.seed;
  cfg["robust"] = RobustJson(c.robust);
  cfg["discrepancy_dirs"] = c.discrepancy_dirs;
  j["config"] = cfg;
  j["lambda0"] = report.lambda0;
  ordered_json cells = ordered_json::array();
  for (const ConsistencySummary& s : report.summaries) {
    ordered_json cell;
    cell["regime"] = s.regime;
    cell["n"] = s.n;
    cell["tau"] = s.tau;
    cell["d"] = s.d;
    cell["spec"] = SpecObject(c.specs[static_cast<size_t>(s.spec_index)]);
    cell["failures"] = s.failures;
    cell["lx"] = SummaryJson(s.lx);
    cell["ly"] = SummaryJson(s.ly);
    cell["lambda_err"] = SummaryJson(s.lambda_err);
    cell["angle_x"] = SummaryJson(s.angle_x);
    cell["angle_y"] = SummaryJson(s.angle_y);
    if (c.discrepancy_dirs > 0) cell["c_x_lower_bound"] = SummaryJson(s.c_x);
    cell["tau_psi_proj"] = s.tau_psi_proj;
    cells.push_back(cell);
  }
  j["cells"] = cells;
  return Dump(j);
}

std::string ConsistencyGnuplot(const ConsistencyReport& report) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set logscale x\n"
      << "set xlabel 'n'\n"
      << "set terminal pngcairo size 1200,400\n"
      << "set output 'consistency.png'\n"
      << "set multiplot layout 1,3\n";
  const char* cols[] = {"lx_median", "ly_median", "lambda_err_median"};
  const int idx[] = {8, 11, 14};
  for (int p = 0; p < 3; ++p) {
    out << "set title '" << cols[p] << "'\n plot";
    bool first = true;
    for (const char* regime : {"penalty", "sieve"}) {
      for (size_t s = 0; s < report.config.specs.size(); ++s) {
        if (!first) out << ",";
        first = false;
        out << " 'consistency_summary.csv' using (strcol(1) eq '" << regime << "' && $5 == " << s
            << " ? $2 : NaN):" << idx[p] << " with linespoints title '" << regime << " spec " << s
            << "'";
      }
    }
    out << "\n";
  }
  out << "unset multiplot\n";
  return out.str();
}

std::string RobustnessRowsCsv(const RobustnessReport& report) {
  std::string out =
      "fraction,spec_index,replicate,seed,ok,angle_x,angle_y,lambda_hat,lambda_bias,message,spec\n";
  for (const RobustnessRow& r : report.rows) {
    out += Num(r.fraction) + "," + std::to_string(r.spec_index) + "," + std::to_string(r.replicate) +
           "," + std::to_string(r.seed) + "," + (r.ok ? "1" : "0") + "," + Num(r.angle_x) + "," +
           Num(r.angle_y) + "," + Num(r.lambda_hat) + "," + Num(r.lambda_bias) + "," +
           CsvField(r.message) + "," +
           CsvField(SpecToJson(report.config.specs[static_cast<size_t>(r.spec_index)])) + "\n";
  }
  return out;
}

std::string RobustnessSummaryCsv(const RobustnessReport& report) {
  std::string out =
      "fraction,spec_index,count,failures,angle_x_median,angle_x_q1,angle_x_q3,angle_y_median,"
      "lambda_bias_median,lambda_bias_q1,lambda_bias_q3,win_rate_vs_classical,spec\n";
  for (const RobustnessSummary& s : report.summaries) {
    out += Num(s.fraction) + "," + std::to_string(s.spec_index) + "," +
           std::to_string(s.angle_x.count) + "," + std::to_string(s.failures) + "," +
           Num(s.angle_x.median) + "," + Num(s.angle_x.q1) + "," + Num(s.angle_x.q3) + "," +
           Num(s.angle_y.median) + "," + Num(s.lambda_bias.median) + "," +
           Num(s.lambda_bias.q1) + "," + Num(s.lambda_bias.q3) + "," +
           Num(s.win_rate_vs_classical) + "," +
           CsvField(SpecToJson(report.config.specs[static_cast<size_t>(s.spec_index)])) + "\n";
  }
  return out;
}

std::string RobustnessSummaryJson(const RobustnessReport& report) {
  const RobustnessConfig& c = report.config;
  ordered_json j;
  ordered_json cfg;
  cfg["model"] = ModelJson(c.model);
  cfg["fit_basis"] = std::string(ToString(c.fit_kind));
  cfg["d"] = c.d;
  cfg["n"] = c.n;
  cfg["tau_scale"] = c.tau_scale;
  cfg["tau_exponent"] = c.tau_exponent;
  cfg["fractions"] = c.fractions;
  cfg["contamination"] = {{"kind", ContaminationKindName(c.kind)},
                          {"target", TargetName(c.target)},
                          {"magnitude", c.magnitude},
                          {"shape_frequency", c.shape_frequency}};
  ordered_json specs = ordered_json::array();
  for (const auto& s : c.specs) specs.push_back(SpecObject(s));
  cfg["specs"] = specs;
  cfg["replicates"] = c.replicates;
  cfg["seed"] = c.seed;
  cfg["robust"] = RobustJson(c.robust);
  j["config"] = cfg;
  j["lambda0"] = report.lambda0;
  ordered_json cells = ordered_json::array();
  for (const RobustnessSummary& s : report.summaries) {
    ordered_json cell;
    cell["fraction"] = s.fraction;
    cell["spec"] = SpecObject(c.specs[static_cast<size_t>(s.spec_index)]);
    cell["failures"] = s.failures;
    cell["angle_x"] = SummaryJson(s.angle_x);
    cell["angle_y"] = SummaryJson(s.angle_y);
    cell["lambda_bias"] = SummaryJson(s.lambda_bias);
    cell["win_rate_vs_classical"] = s.win_rate_vs_classical;
    cells.push_back(cell);
  }
  j["cells"] = cells;
  return Dump(j);
}

std::string RobustnessGnuplot(const RobustnessReport& report) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set xlabel 'contamination fraction'\n"
      << "set ylabel 'median angle to phi_1 (deg)'\n"
      << "set terminal pngcairo size 800,500\n"
      << "set output 'robustness.png'\n"
      << "plot";
  for (size_t s = 0; s < report.config.specs.size(); ++s) {
    if (s > 0) out << ",";
    out << " 'robustness_summary.csv' using ($2 == " << s
        << " ? $1 : NaN):5:6:7 with yerrorlines title '"
        << ToString(report.config.specs[s].kind) << "'";
  }
  out << "\n";
  return out.str();
}

}  // namespace rscca
