#include "rscca/experiments.h"

#include <cmath>
#include <limits>
#include <string>

#include "rscca/error.h"

namespace rscca {
namespace {

double TauFor(double scale, double exponent, Index n) {
  return scale * std::pow(static_cast<double>(n), exponent);
}

std::vector<double> Column(const std::vector<double>& v) { return v; }

}  // namespace

RobustOptions StudyRobustOptions() {
  RobustOptions out;
  out.random_starts = 1;
  out.max_evals_per_half = 200;
  out.gain_tol = 1e-5;
  out.max_sweeps = 10;
  out.step_tol = 1e-6;
  return out;
}

ProcessModel BuildModel(const ModelConfig& config) {
  const Grid grid = BuildGrid(config.a, config.b, config.m);
  const BasisSystem basis = BuildBasis(config.generator_kind, config.generator_d, grid);
  const VectorXd spec_vec =
      Eigen::Map<const VectorXd>(config.spectrum.data(), static_cast<Index>(config.spectrum.size()));
  return MakeCanonicalModel(basis, config.rho0, spec_vec, config.leading, config.tail);
}

void Validate(const ConsistencyConfig& config) {
  if (config.n_schedule.empty()) throw InputError("consistency run needs an n schedule");
  for (Index n : config.n_schedule) {
    if (n < 10) throw InputError("every n in the schedule must be at least 10");
  }
  if (config.replicates < 1) throw InputError("replicates must be positive");
  if (config.specs.empty()) throw InputError("consistency run needs at least one spec");
  if (!config.penalty_regime && !config.sieve_regime) throw InputError("no regime selected");
  for (const auto& s : config.specs) Validate(s);
}

Index SieveDimension(const ConsistencyConfig& config, Index n) {
  auto d = static_cast<Index>(
      std::ceil(config.sieve_scale * std::pow(static_cast<double>(n), config.sieve_exponent) - 1e-12));
  if (config.fit_kind == BasisKind::kFourier) {
    d = std::max<Index>(d, 3);
    if (d % 2 == 0) ++d;
  } else {
    d = std::max<Index>(d, 4);
  }
  return d;
}

ConsistencyReport RunConsistency(const ConsistencyConfig& config, const Progress& progress) {
  Validate(config);
  const ProcessModel model = BuildModel(config.model);
  const Grid& grid = model.basis().grid();

  ConsistencyReport report;
  report.config = config;
  report.lambda0 = model.lambda0();

  struct Regime {
    std::string name;
    bool sieve;
  };
  std::vector<Regime> regimes;
  if (config.penalty_regime) regimes.push_back({"penalty", false});
  if (config.sieve_regime) regimes.push_back({"sieve", true});

  for (const Regime& regime : regimes) {
    for (Index n : config.n_schedule) {
      const Index d = regime.sieve ? SieveDimension(config, n) : config.penalty_d;
      const double tau = TauFor(config.tau_scale, config.tau_exponent, n);
      const BasisSystem fit_basis = BuildBasis(config.fit_kind, d, grid);
      const PopulationMoments pop = ComputePopulationMoments(model, fit_basis);
      const VectorXd phi1 = ProjectCoefficients(fit_basis, model.basis(), model.true_phi());
      const VectorXd psi1 = ProjectCoefficients(fit_basis, model.basis(), model.true_psi());
      const double tau_psi = tau * Roughness(fit_basis, phi1);

      for (size_t s = 0; s < config.specs.size(); ++s) {
        const AssociationSpec& spec = config.specs[s];
        const double scale_factor =
            config.discrepancy_dirs > 0 ? EllipticalScaleFactor(spec, model.tail(), config.seed) : 1.0;
        std::vector<ConsistencyRow> rows;
        for (int rep = 0; rep < config.replicates; ++rep) {
          ConsistencyRow row;
          row.regime = regime.name;
          row.n = n;
          row.tau = tau;
          row.d = d;
          row.spec_index = static_cast<int>(s);
          row.replicate = rep;
          row.seed = DeriveSeed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
          row.tau_psi_proj = tau_psi;
          try {
            const SamplePair data = SamplePairs(model, n, row.seed);
            const ObjectiveContext ctx = MakeContext(ProjectSample(data.x, fit_basis),
                                                     ProjectSample(data.y, fit_basis), fit_basis,
                                                     spec, tau, tau);
            RobustOptions opts = config.robust;
            opts.seed = row.seed;
            const SccaFit fit = Fit(ctx, opts);
            row.lambda_hat = fit.lambda_hat;
            row.lambda_err = std::abs(fit.lambda_hat - model.lambda0());
            row.lx = PopulationSquaredCorrelation(fit.phi.coef, phi1, pop.xx);
            row.ly = PopulationSquaredCorrelation(fit.psi.coef, psi1, pop.yy);
            row.angle_x = AngleDegrees(fit.phi.coef, phi1, fit_basis.gram());
            row.angle_y = AngleDegrees(fit.psi.coef, psi1, fit_basis.gram());
            if (config.discrepancy_dirs > 0) {
              const DiscrepancyEstimate disc = DiscrepancySuprema(
                  ctx.scores_x, ctx.scores_y, spec, tau, fit_basis, pop, scale_factor,
                  config.discrepancy_dirs, DeriveSeed(row.seed, 17, 0), {fit.phi.coef},
                  {fit.psi.coef});
              row.c_x = disc.c_x;
              row.c_y = disc.c_y;
              row.c_xy = disc.c_xy;
            }
            row.ok = true;
          } catch (const std::exception& e) {
            row.ok = false;
            row.message = e.what();
          }
          rows.push_back(row);
        }

        ConsistencySummary sum;
        sum.regime = regime.name;
        sum.n = n;
        sum.tau = tau;
        sum.d = d;
        sum.spec_index = static_cast<int>(s);
        sum.tau_psi_proj = tau_psi;
        std::vector<double> lx, ly, lerr, ax, ay, cx;
        for (const auto& r : rows) {
          if (!r.ok) {
            ++sum.failures;
            continue;
          }
          lx.push_back(r.lx);
          ly.push_back(r.ly);
          lerr.push_back(r.lambda_err);
          ax.push_back(r.angle_x);
          ay.push_back(r.angle_y);
          cx.push_back(config.discrepancy_dirs > 0 ? r.c_x : std::numeric_limits<double>::quiet_NaN());
        }
        sum.lx = Summarize(lx);
        sum.ly = Summarize(ly);
        sum.lambda_err = Summarize(lerr);
        sum.angle_x = Summarize(ax);
        sum.angle_y = Summarize(ay);
        sum.c_x = Summarize(Column(cx));
        report.summaries.push_back(sum);
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
        if (progress) {
          progress(regime.name + " n=" + std::to_string(n) + " d=" + std::to_string(d) + " spec=" +
                   std::string(ToString(spec.kind)) + " median lx=" + std::to_string(sum.lx.median));
        }
      }
    }
  }
  return report;
}

std::vector<AssociationSpec> DefaultRobustnessSpecs() {
  AssociationSpec classical;
  classical.kind = AssociationKind::kCovPearson;
  AssociationSpec gk;
  gk.kind = AssociationKind::kGkBounded;
  AssociationSpec m;
  m.kind = AssociationKind::kMScatter;
  return {classical, gk, m};
}

void Validate(const RobustnessConfig& config) {
  if (config.fractions.empty()) throw InputError("robustness run needs contamination fractions");
  for (double f : config.fractions) {
    if (!(f >= 0.0 && f < 0.5)) {
      throw InputError("contamination fraction " + std::to_string(f) + " must lie in [0, 0.5)");
    }
  }
  if (config.n < 10) throw InputError("robustness run needs n >= 10");
  if (config.replicates < 1) throw InputError("replicates must be positive");
  for (const auto& s : config.specs) Validate(s);
}

RobustnessReport RunRobustness(const RobustnessConfig& config_in, const Progress& progress) {
  RobustnessConfig config = config_in;
  if (config.specs.empty()) config.specs = DefaultRobustnessSpecs();
  Validate(config);
  const ProcessModel model = BuildModel(config.model);
  const Grid& grid = model.basis().grid();
  const BasisSystem fit_basis = BuildBasis(config.fit_kind, config.d, grid);
  const VectorXd phi1 = ProjectCoefficients(fit_basis, model.basis(), model.true_phi());
  const VectorXd psi1 = ProjectCoefficients(fit_basis, model.basis(), model.true_psi());
  const double tau = TauFor(config.tau_scale, config.tau_exponent, config.n);

  ContaminationModel contamination = DefaultContamination(model);
  contamination.kind = config.kind;
  contamination.target = config.target;
  contamination.shape = SineShape(grid, config.shape_frequency);
  if (!std::isnan(config.magnitude)) contamination.magnitude = config.magnitude;

  int classical_index = -1;
  for (size_t s = 0; s < config.specs.size(); ++s) {
    if (config.specs[s].kind == AssociationKind::kCovPearson) {
      classical_index = static_cast<int>(s);
      break;
    }
  }

  RobustnessReport report;
  report.config = config;
  report.lambda0 = model.lambda0();
  const size_t n_specs = config.specs.size();

  for (size_t f = 0; f < config.fractions.size(); ++f) {
    contamination.fraction = config.fractions[f];
    std::vector<std::vector<RobustnessRow>> by_spec(n_specs);
    for (int rep = 0; rep < config.replicates; ++rep) {
      const std::uint64_t seed = DeriveSeed(config.seed, 1000 + f, static_cast<std::uint64_t>(rep));
      const SamplePair clean = SamplePairs(model, config.n, seed);
      const ContaminatedPair data = Contaminate(clean, contamination, DeriveSeed(seed, 3, 0));
      const MatrixXd sx = ProjectSample(data.samples.x, fit_basis);
      const MatrixXd sy = ProjectSample(data.samples.y, fit_basis);
      for (size_t s = 0; s < n_specs; ++s) {
        RobustnessRow row;
        row.fraction = config.fractions[f];
        row.spec_index = static_cast<int>(s);
        row.replicate = rep;
        row.seed = seed;
        try {
          const ObjectiveContext ctx = MakeContext(sx, sy, fit_basis, config.specs[s], tau, tau);
          RobustOptions opts = config.robust;
          opts.seed = seed;
          const SccaFit fit = Fit(ctx, opts);
          row.angle_x = AngleDegrees(fit.phi.coef, phi1, fit_basis.gram());
          row.angle_y = AngleDegrees(fit.psi.coef, psi1, fit_basis.gram());
          row.lambda_hat = fit.lambda_hat;
          row.lambda_bias = fit.lambda_hat - model.lambda0();
          row.ok = true;
        } catch (const std::exception& e) {
          row.message = e.what();
        }
        by_spec[s].push_back(row);
      }
    }
    for (size_t s = 0; s < n_specs; ++s) {
      RobustnessSummary sum;
      sum.fraction = config.fractions[f];
      sum.spec_index = static_cast<int>(s);
      std::vector<double> ax, ay, bias;
      int wins = 0;
      int paired = 0;
      for (size_t r = 0; r < by_spec[s].size(); ++r) {
        const RobustnessRow& row = by_spec[s][r];
        if (!row.ok) {
          ++sum.failures;
          continue;
        }
        ax.push_back(row.angle_x);
        ay.push_back(row.angle_y);
        bias.push_back(row.lambda_bias);
        if (classical_index >= 0) {
          const RobustnessRow& ref = by_spec[static_cast<size_t>(classical_index)][r];
          if (ref.ok) {
            ++paired;
            if (row.angle_x < ref.angle_x) ++wins;
          }
        }
      }
      sum.angle_x = Summarize(ax);
      sum.angle_y = Summarize(ay);
      sum.lambda_bias = Summarize(bias);
      sum.win_rate_vs_classical = paired > 0 ? static_cast<double>(wins) / paired
                                             : std::numeric_limits<double>::quiet_NaN();
      report.summaries.push_back(sum);
      report.rows.insert(report.rows.end(), by_spec[s].begin(), by_spec[s].end());
      if (progress) {
        progress("eps=" + std::to_string(sum.fraction) + " spec=" +
                 std::string(ToString(config.specs[s].kind)) +
                 " median angle=" + std::to_string(sum.angle_x.median));
      }
    }
  }
  return report;
}

}  // namespace rscca
