#include "qotl/experiments.hpp"

#include <cmath>

#include "qotl/autodiff.hpp"
#include "qotl/parallel.hpp"
#include "qotl/transport.hpp"

namespace qotl {

namespace {

enum : std::uint64_t { kTagSpec = 1, kTagTrial = 2, kTagShotMatrix = 3, kTagTargets = 4 };

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd / std::sqrt(n)};
}

double sample_variance(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return xs.size() < 2 ? 0.0 : ss / (n - 1.0);
}

Ensemble push_batch(const CircuitSpec& spec, const std::vector<LatentVector>& batch) {
  std::vector<Statevector> states;
  states.reserve(batch.size());
  for (const auto& z : batch) states.push_back(run_circuit(spec, z));
  return Ensemble::uniform(std::move(states));
}

double batch_otl(const CircuitSpec& data_spec, const CircuitSpec& model_spec,
                 const std::vector<LatentVector>& zt, const std::vector<LatentVector>& zs) {
  const Ensemble ensemble = push_batch(data_spec, zt);
  const Rng dummy(0);
  return evaluate_otl(ensemble, model_spec, zs, GroundCost::exact_local(), dummy).solution.loss;
}

// Slot-0 derivative of the loss at a fixed plan.
double plan_slot_grad(const Ensemble& ensemble, const CircuitSpec& spec,
                      const std::vector<LatentVector>& zs, const OtlEvaluation& eval,
                      const GroundCost& cost) {
  const Rng dummy(0);
  double g = 0.0;
  for (const auto& entry : eval.solution.plan.entries) {
    const double dslot = ground_cost_slot_grad(ensemble.states[static_cast<std::size_t>(entry.i)],
                                               spec, zs[static_cast<std::size_t>(entry.j)], 0, cost,
                                               dummy, eval.matrix.at(entry.i, entry.j));
    // d(angle)/d(theta_0) is the bias or z value wired into slot 0.
    g += entry.flow * dslot * zs[static_cast<std::size_t>(entry.j)].feature(spec.eta()[0]);
  }
  return g;
}

}  // namespace

ScalingAResult run_scaling_a(const ScalingAConfig& config) {
  const Rng root(config.seed);
  ScalingAResult out;

  struct Cell {
    int n, n_z;
    CircuitSpec spec;
  };
  std::vector<Cell> cells;
  for (int n : config.ns)
    for (int nz : config.nzs) {
      Rng cell_rng = root.stream(kTagSpec, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(nz));
      cells.push_back({n, nz, build_hea(n, default_layers(n, nz), nz, Entangler::CZ, cell_rng)});
    }

  const std::size_t per_cell = config.ms.size() * static_cast<std::size_t>(config.n_monte);
  out.raw.resize(cells.size() * per_cell);
  par::for_each_index(static_cast<std::ptrdiff_t>(out.raw.size()), [&](std::ptrdiff_t idx) {
    const std::size_t u = static_cast<std::size_t>(idx);
    const std::size_t ci = u / per_cell;
    const std::size_t mi = (u % per_cell) / static_cast<std::size_t>(config.n_monte);
    const int trial = static_cast<int>(u % static_cast<std::size_t>(config.n_monte));
    const Cell& cell = cells[ci];
    const int m = config.ms[mi];
    Rng job_rng = root.stream(kTagTrial, static_cast<std::uint64_t>(cell.n),
                              static_cast<std::uint64_t>(cell.n_z), static_cast<std::uint64_t>(m),
                              static_cast<std::uint64_t>(trial));
    const auto zt = sample_latent_batch(cell.n_z, m, job_rng);
    const auto zs = sample_latent_batch(cell.n_z, m, job_rng);
    out.raw[u] = {cell.n, cell.n_z, m, trial, batch_otl(cell.spec, cell.spec, zt, zs)};
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci)
    for (std::size_t mi = 0; mi < config.ms.size(); ++mi) {
      std::vector<double> js;
      js.reserve(static_cast<std::size_t>(config.n_monte));
      const std::size_t base = ci * per_cell + mi * static_cast<std::size_t>(config.n_monte);
      for (int t = 0; t < config.n_monte; ++t) js.push_back(out.raw[base + static_cast<std::size_t>(t)].j);
      const auto [mean, se] = mean_stderr(js);
      out.agg.push_back({cells[ci].n, cells[ci].n_z, config.ms[mi], config.n_monte, mean, se});
    }
  return out;
}

ScalingBResult run_scaling_b(const ScalingBConfig& config) {
  const Rng root(config.seed);
  ScalingBResult out;

  struct Cell {
    int n, n_z;
    CircuitSpec model, data;
  };
  std::vector<Cell> cells;
  for (int n : config.ns)
    for (int nz : config.nzs) {
      Rng cell_rng = root.stream(kTagSpec, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(nz));
      const int nl = default_layers(n, nz);
      CircuitSpec model = build_hea(n, nl, nz, Entangler::CZ, cell_rng);
      CircuitSpec data = build_hea(n, nl, nz, Entangler::CZ, cell_rng);
      // The two families must differ in both the axis and the wire pattern.
      while (data.xi() == model.xi() || data.eta() == model.eta())
        data = build_hea(n, nl, nz, Entangler::CZ, cell_rng);
      cells.push_back({n, nz, std::move(model), std::move(data)});
    }

  const std::size_t per_cell = config.ms.size() * static_cast<std::size_t>(config.n_monte);
  out.raw.resize(cells.size() * per_cell);
  par::for_each_index(static_cast<std::ptrdiff_t>(out.raw.size()), [&](std::ptrdiff_t idx) {
    const std::size_t u = static_cast<std::size_t>(idx);
    const std::size_t ci = u / per_cell;
    const std::size_t mi = (u % per_cell) / static_cast<std::size_t>(config.n_monte);
    const int trial = static_cast<int>(u % static_cast<std::size_t>(config.n_monte));
    const Cell& cell = cells[ci];
    const int m = config.ms[mi];
    Rng job_rng = root.stream(kTagTrial, static_cast<std::uint64_t>(cell.n),
                              static_cast<std::uint64_t>(cell.n_z), static_cast<std::uint64_t>(m),
                              static_cast<std::uint64_t>(trial));
    const auto zt = sample_latent_batch(cell.n_z, m, job_rng);
    const auto zs = sample_latent_batch(cell.n_z, m, job_rng);
    out.raw[u] = {cell.n, cell.n_z, m, trial, batch_otl(cell.data, cell.model, zt, zs)};
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t mi = 0; mi < config.ms.size(); ++mi) {
      std::vector<double> js;
      const std::size_t base = ci * per_cell + mi * static_cast<std::size_t>(config.n_monte);
      for (int t = 0; t < config.n_monte; ++t) js.push_back(out.raw[base + static_cast<std::size_t>(t)].j);
      const auto [mean, se] = mean_stderr(js);
      out.agg.push_back({cells[ci].n, cells[ci].n_z, config.ms[mi], config.n_monte, mean, se});
      points.emplace_back(static_cast<double>(config.ms[mi]), mean);
    }
    const PowerLawFit fit = fit_power_law(points);
    out.fits.push_back({cells[ci].n, cells[ci].n_z, fit.a, fit.b, fit.c, fit.sse, fit.flagged,
                        points.back().second});
  }
  return out;
}

ShotErrorResult run_shot_error(const ShotErrorConfig& config) {
  const Rng root(config.seed);
  ShotErrorResult out;

  struct Cell {
    int n_z;
    CircuitSpec model, data;
  };
  std::vector<Cell> cells;
  for (int nz : config.nzs) {
    Rng cell_rng = root.stream(kTagSpec, static_cast<std::uint64_t>(config.n),
                               static_cast<std::uint64_t>(nz));
    const int nl = default_layers(config.n, nz);
    CircuitSpec model = build_hea(config.n, nl, nz, Entangler::CZ, cell_rng);
    CircuitSpec data = build_hea(config.n, nl, nz, Entangler::CZ, cell_rng);
    cells.push_back({nz, std::move(model), std::move(data)});
  }

  const std::size_t shots_n = config.shot_counts.size();
  const std::size_t per_job = shots_n;  // one row per shot budget, shared batches
  const std::size_t jobs_per_cell = config.ms.size() * static_cast<std::size_t>(config.n_monte);
  out.raw.resize(cells.size() * jobs_per_cell * per_job);
  par::for_each_index(static_cast<std::ptrdiff_t>(cells.size() * jobs_per_cell),
                      [&](std::ptrdiff_t idx) {
    const std::size_t u = static_cast<std::size_t>(idx);
    const std::size_t ci = u / jobs_per_cell;
    const std::size_t mi = (u % jobs_per_cell) / static_cast<std::size_t>(config.n_monte);
    const int trial = static_cast<int>(u % static_cast<std::size_t>(config.n_monte));
    const Cell& cell = cells[ci];
    const int m = config.ms[mi];
    Rng job_rng = root.stream(kTagTrial, static_cast<std::uint64_t>(cell.n_z),
                              static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial));
    const auto zt = sample_latent_batch(cell.n_z, m, job_rng);
    const auto zs = sample_latent_batch(cell.n_z, m, job_rng);
    const Ensemble ensemble = push_batch(cell.data, zt);
    const Rng dummy(0);
    const double j_exact =
        evaluate_otl(ensemble, cell.model, zs, GroundCost::exact_local(), dummy).solution.loss;
    for (std::size_t si = 0; si < shots_n; ++si) {
      const int n_s = config.shot_counts[si];
      const Rng matrix_rng =
          root.stream(kTagShotMatrix, static_cast<std::uint64_t>(cell.n_z),
                      static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(n_s));
      const double j_s = evaluate_otl(ensemble, cell.model, zs,
                                      GroundCost::sampled_local(static_cast<std::uint32_t>(n_s)),
                                      matrix_rng)
                             .solution.loss;
      out.raw[u * per_job + si] = {config.n,  cell.n_z, m, n_s, trial,
                                   std::abs(j_s - j_exact)};
    }
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci)
    for (std::size_t mi = 0; mi < config.ms.size(); ++mi)
      for (std::size_t si = 0; si < shots_n; ++si) {
        std::vector<double> errs;
        for (int t = 0; t < config.n_monte; ++t) {
          const std::size_t job = ci * jobs_per_cell + mi * static_cast<std::size_t>(config.n_monte) +
                                  static_cast<std::size_t>(t);
          errs.push_back(out.raw[job * per_job + si].abs_err);
        }
        const auto [mean, se] = mean_stderr(errs);
        out.agg.push_back({config.n, cells[ci].n_z, config.ms[mi], config.shot_counts[si],
                           config.n_monte, mean, se});
      }
  return out;
}

GradVarResult run_grad_var(const GradVarConfig& config) {
  const Rng root(config.seed);
  GradVarResult out;

  struct Cell {
    int n, n_l, m;
    Ensemble targets;
  };
  std::vector<Cell> cells;
  for (int n : config.ns)
    for (int nl : config.nls)
      for (int m : config.ms) {
        Rng target_rng = root.stream(kTagTargets, static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(nl), static_cast<std::uint64_t>(m));
        cells.push_back({n, nl, m, gen_hard_target_ensemble(n, m, target_rng)});
      }

  const std::size_t trials = static_cast<std::size_t>(config.n_monte);
  // Two rows per (cell, trial): the global arm then the local arm.
  out.raw.resize(cells.size() * trials * 2);
  par::for_each_index(static_cast<std::ptrdiff_t>(cells.size() * trials), [&](std::ptrdiff_t idx) {
    const std::size_t u = static_cast<std::size_t>(idx);
    const std::size_t ci = u / trials;
    const int trial = static_cast<int>(u % trials);
    const Cell& cell = cells[ci];
    Rng trial_rng = root.stream(kTagTrial, static_cast<std::uint64_t>(cell.n),
                                static_cast<std::uint64_t>(cell.n_l),
                                static_cast<std::uint64_t>(cell.m),
                                static_cast<std::uint64_t>(trial));
    const CircuitSpec spec = build_hea(cell.n, cell.n_l, 1, Entangler::CZ, trial_rng);
    const auto zs = sample_latent_batch(1, cell.m, trial_rng);
    const Rng dummy(0);
    const auto eval_g = evaluate_otl(cell.targets, spec, zs, GroundCost::exact_global(), dummy);
    const auto eval_l = evaluate_otl(cell.targets, spec, zs, GroundCost::exact_local(), dummy);
    const double gg = plan_slot_grad(cell.targets, spec, zs, eval_g, GroundCost::exact_global());
    const double gl = plan_slot_grad(cell.targets, spec, zs, eval_l, GroundCost::exact_local());
    out.raw[2 * u] = {"global", cell.n, cell.n_l, cell.m, trial, gg};
    out.raw[2 * u + 1] = {"local", cell.n, cell.n_l, cell.m, trial, gl};
  });

  for (std::size_t ci = 0; ci < cells.size(); ++ci)
    for (int arm = 0; arm < 2; ++arm) {
      std::vector<double> gs;
      for (std::size_t t = 0; t < trials; ++t)
        gs.push_back(out.raw[2 * (ci * trials + t) + static_cast<std::size_t>(arm)].grad);
      out.agg.push_back({arm == 0 ? "global" : "local", cells[ci].n, cells[ci].n_l, cells[ci].m,
                         config.n_monte, sample_variance(gs)});
    }
  return out;
}

}  // namespace qotl
