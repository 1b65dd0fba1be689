#ifndef RSCCA_JSON_IO_H_
#define RSCCA_JSON_IO_H_

#include <string>
#include <string_view>

#include "rscca/experiments.h"
#include "rscca/function_space.h"
#include "rscca/robust_measures.h"
#include "rscca/scca.h"
#include "rscca/simulation.h"

namespace rscca {

// {"kind":"gk_bounded","scale":{"kind":"mad","c":1.4826022185056018}}
// Missing constants take their defaults; unknown keys are rejected.
std::string SpecToJson(const AssociationSpec& spec);
AssociationSpec SpecFromJson(std::string_view text);

// fit.json: coefficients in both norm conventions, lambda_hat, the
// unpenalized association, spec echo, smoothing, seed, basis and a trace
// summary with one entry per restart.
std::string FitToJson(const SccaFit& fit, const BasisSystem& basis);

// Grid column followed by the curve values of phi (or psi).
std::string DirectionCsv(const BasisSystem& basis, const Direction& direction);

// Model, seed and true directions of a `simulate` run.
std::string ManifestJson(const ModelConfig& config, const ProcessModel& model, Index n,
                         std::uint64_t seed, const ContaminationModel* contamination,
                         const std::vector<Index>& contaminated_rows);

std::string TauSelectionJson(const TauSelection& selection, const AssociationSpec& spec, int folds,
                             std::uint64_t seed);
std::string TauSelectionCsv(const TauSelection& selection, const AssociationSpec& spec);

// Per-replicate rows and per-cell summaries; every row carries the spec echo.
std::string ConsistencyRowsCsv(const ConsistencyReport& report);
std::string ConsistencySummaryCsv(const ConsistencyReport& report);
std::string ConsistencySummaryJson(const ConsistencyReport& report);
std::string ConsistencyGnuplot(const ConsistencyReport& report);

std::string RobustnessRowsCsv(const RobustnessReport& report);
std::string RobustnessSummaryCsv(const RobustnessReport& report);
std::string RobustnessSummaryJson(const RobustnessReport& report);
std::string RobustnessGnuplot(const RobustnessReport& report);

// Double-quotes a CSV field when it contains a comma, quote or newline.
std::string CsvField(std::string_view text);

}  // namespace rscca

#endif  // RSCCA_JSON_IO_H_
