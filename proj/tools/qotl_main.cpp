#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qotl/anomaly.hpp"
#include "qotl/ansatz.hpp"
#include "qotl/autodiff.hpp"
#include "qotl/checkpoint.hpp"
#include "qotl/cost.hpp"
#include "qotl/csv.hpp"
#include "qotl/experiments.hpp"
#include "qotl/oracles.hpp"
#include "qotl/parallel.hpp"
#include "qotl/qsim.hpp"
#include "qotl/runrecord.hpp"
#include "qotl/train.hpp"
#include "qotl/transport.hpp"

namespace fs = std::filesystem;
using namespace qotl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

// CLI-level stream tags; train/anomaly derive their own children per
// iteration, so these only have to avoid colliding with each other.
constexpr std::uint64_t kTagDataset = 100;
constexpr std::uint64_t kTagModel = 101;

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out = ".";
  int threads = 0;
};

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

/// Writes data files into one directory and collects their digests for the
/// run record, which is written last with the wall times.
struct Emitter {
  fs::path dir;
  RunRecord record;

  Emitter(const std::string& out, const std::string& tool) : dir(ensure_out_dir(out)) {
    record.tool = tool;
    record.started_at = iso8601_now();
  }
  void csv(const std::string& name, const CsvWriter& w) {
    const fs::path path = dir / name;
    w.write_file(path);
    record.add_output(path);
  }
  void finish() {
    record.finished_at = iso8601_now();
    write_run_record(dir / (record.tool + "_record.txt"), record);
  }
};

GroundCost make_cost(const std::string& kind, int shots) {
  const auto n_s = static_cast<std::uint32_t>(shots);
  if (kind == "global") return shots > 0 ? GroundCost::sampled_global(n_s) : GroundCost::exact_global();
  return shots > 0 ? GroundCost::sampled_local(n_s) : GroundCost::exact_local();
}

Entangler parse_entangler(const std::string& s) {
  return s == "cx" ? Entangler::CX : Entangler::CZ;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt_double(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  int n = 2;
  int layers = 0;  // 0 picks the depth default
  int nz = 1;
  int m = 30;
  int mg = 0;  // 0 matches m
  int iterations = 100;
  double lr = 0.01;
  int shots = 0;
  std::string cost = "local";
  std::string family = "hea";
  int block_size = 2;
  std::string entangler = "cz";
  std::string dataset = "equator";
  double mu = 0.5, sigma = 0.05, phase_lo = 0.0, phase_hi = 1.0;
  int restarts = 1;
  bool record_global = false;
};

Ensemble build_dataset(const TrainOpts& o, Rng& rng) {
  if (o.dataset == "localized")
    return gen_localized_ensemble(o.n, o.m, o.mu, o.sigma, o.phase_lo, o.phase_hi, rng);
  if (o.dataset == "hard") return gen_hard_target_ensemble(o.n, o.m, rng);
  return gen_equator_ensemble(o.n, o.m, rng);
}

CircuitSpec build_model(int n, int layers, int nz, const std::string& family, int block_size,
                        const std::string& entangler, Rng& rng) {
  const Entangler ent = parse_entangler(entangler);
  if (family == "ala") return build_ala(n, layers, nz, block_size, ent, rng);
  return build_hea(n, layers, nz, ent, rng);
}

int run_train(const GlobalOpts& g, const TrainOpts& o) {
  Emitter out(g.out, "train");
  out.record.set("seed", std::to_string(g.seed));
  out.record.set("n", std::to_string(o.n));
  out.record.set("layers", std::to_string(o.layers));
  out.record.set("nz", std::to_string(o.nz));
  out.record.set("m", std::to_string(o.m));
  out.record.set("mg", std::to_string(o.mg));
  out.record.set("iterations", std::to_string(o.iterations));
  out.record.set("lr", fmt_double(o.lr));
  out.record.set("shots", std::to_string(o.shots));
  out.record.set("cost", o.cost);
  out.record.set("family", o.family);
  out.record.set("block_size", std::to_string(o.block_size));
  out.record.set("entangler", o.entangler);
  out.record.set("dataset", o.dataset);
  out.record.set("mu", fmt_double(o.mu));
  out.record.set("sigma", fmt_double(o.sigma));
  out.record.set("phase_lo", fmt_double(o.phase_lo));
  out.record.set("phase_hi", fmt_double(o.phase_hi));
  out.record.set("record_global", o.record_global ? "1" : "0");
  out.record.set("restarts", std::to_string(o.restarts));

  Rng root(g.seed);
  Rng data_rng = root.stream(kTagDataset);
  Rng model_rng = root.stream(kTagModel);
  const Ensemble ensemble = build_dataset(o, data_rng);
  const int layers = o.layers > 0 ? o.layers : default_layers(o.n, o.nz);
  const CircuitSpec wiring =
      build_model(o.n, layers, o.nz, o.family, o.block_size, o.entangler, model_rng);

  // Candidate k trains from its own centered init under batch seed
  // 100 seed + k; the lowest final training loss is kept.
  std::optional<TrainResult> best;
  int winner = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int k = 0; k < std::max(1, o.restarts); ++k) {
    TrainConfig cfg;
    cfg.iterations = o.iterations;
    cfg.m_g = o.mg;
    cfg.cost = make_cost(o.cost, o.shots);
    cfg.adam.lr = o.lr;
    cfg.seed = g.seed * 100 + static_cast<std::uint64_t>(k);
    cfg.record_global = o.record_global;
    TrainResult candidate = train(ensemble, redraw_theta_centered(wiring, model_rng), cfg);
    double loss = std::numeric_limits<double>::infinity();
    if (!candidate.trace.iters.empty() && std::isfinite(candidate.trace.iters.back().loss))
      loss = candidate.trace.iters.back().loss;
    if (!best || loss < best_loss) {
      best_loss = loss;
      winner = k;
      best = std::move(candidate);
    }
  }
  TrainResult& result = *best;
  out.record.set("restart_winner", std::to_string(winner));

  CsvWriter trace({"iteration", "loss", "global_loss", "grad_norm", "forward_evals",
                   "forward_shots", "grad_evals", "grad_shots"});
  for (const TrainIterRecord& r : result.trace.iters) {
    trace.row({std::int64_t{r.iteration}, r.loss, r.global_loss, r.grad_norm, r.forward_evals,
               r.forward_shots, r.grad_evals, r.grad_shots});
  }
  out.csv("train_trace.csv", trace);

  const fs::path ck = out.dir / "checkpoint.txt";
  save_checkpoint(ck, result.spec, &result.opt);
  out.record.add_output(ck);
  out.finish();

  if (result.trace.diverged) {
    std::cerr << "training diverged: " << result.trace.diagnostic << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// anomaly

struct AnomalyOpts {
  std::string checkpoint;
  double theta_min = 0.0, theta_max = 2.0, theta_step = 0.1;
  std::vector<double> phis{0.0};
  int iterations = 200;
  double step = 0.05;
  int restarts = 4;
  int shots = 0;
  std::string cost = "local";
  std::string init = "random";
  bool with_theory = false;
  double threshold = -1.0;
  bool has_threshold = false;
};

int run_anomaly(const GlobalOpts& g, const AnomalyOpts& o) {
  Emitter out(g.out, "anomaly");
  out.record.set("seed", std::to_string(g.seed));
  out.record.set("checkpoint", o.checkpoint);
  out.record.set("theta_min", fmt_double(o.theta_min));
  out.record.set("theta_max", fmt_double(o.theta_max));
  out.record.set("theta_step", fmt_double(o.theta_step));
  out.record.set("phi", join_doubles(o.phis));
  out.record.set("iterations", std::to_string(o.iterations));
  out.record.set("step", fmt_double(o.step));
  out.record.set("restarts", std::to_string(o.restarts));
  out.record.set("shots", std::to_string(o.shots));
  out.record.set("cost", o.cost);
  out.record.set("init", o.init);
  out.record.set("with_theory", o.with_theory ? "1" : "0");
  if (o.has_threshold) out.record.set("threshold", fmt_double(o.threshold));

  const Checkpoint ck = load_checkpoint(o.checkpoint);
  const CircuitSpec& spec = ck.spec;

  std::vector<double> thetas;
  for (double t = o.theta_min; t <= o.theta_max + 1e-12; t += o.theta_step) thetas.push_back(t);
  const auto grid = gen_test_grid(spec.qubits(), thetas, o.phis);

  AnomalyConfig cfg;
  cfg.cost = make_cost(o.cost, o.shots);
  cfg.iterations = o.iterations;
  cfg.step = o.step;
  cfg.restarts = o.restarts;
  cfg.init = o.init == "grid" ? AnomalyConfig::Init::Grid : AnomalyConfig::Init::Random;
  cfg.seed = g.seed;
  const auto rows = score_grid(grid, spec, cfg);

  std::vector<std::string> columns{"theta_t", "phi_t", "score"};
  for (int k = 1; k <= spec.latent_dim(); ++k) columns.push_back("argmin_z" + std::to_string(k));
  columns.push_back("restarts_used");
  if (o.with_theory) columns.push_back("theory");
  if (o.has_threshold) columns.push_back("anomalous");
  CsvWriter csv(std::move(columns));
  for (const ScoreRow& r : rows) {
    std::vector<CsvValue> cells{r.theta_t, r.phi_t, r.score};
    for (double z : r.argmin.z) cells.emplace_back(z);
    cells.emplace_back(std::int64_t{r.restarts});
    if (o.with_theory) cells.emplace_back(theoretical_as_equator(r.theta_t, spec.qubits()));
    if (o.has_threshold) cells.emplace_back(std::int64_t{r.score > o.threshold ? 1 : 0});
    csv.row(cells);
  }
  out.csv("scores.csv", csv);
  out.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bloch

struct BlochOpts {
  std::string checkpoint;
  int points = 101;
};

int run_bloch(const GlobalOpts& g, const BlochOpts& o) {
  Emitter out(g.out, "bloch");
  out.record.set("seed", std::to_string(g.seed));
  out.record.set("checkpoint", o.checkpoint);
  out.record.set("points", std::to_string(o.points));

  const Checkpoint ck = load_checkpoint(o.checkpoint);
  const CircuitSpec& spec = ck.spec;

  CsvWriter csv({"z", "bloch_x", "bloch_y", "bloch_z", "residual"});
  for (int i = 0; i < o.points; ++i) {
    const double z1 = o.points < 2 ? 0.0 : static_cast<double>(i) / (o.points - 1);
    LatentVector z;
    z.z.assign(static_cast<std::size_t>(spec.latent_dim()), 0.5);
    if (!z.z.empty()) z.z[0] = z1;
    const BlochVector b = bloch_projection(run_circuit(spec, z));
    csv.row({z1, b.x, b.y, b.z, b.residual});
  }
  out.csv("bloch.csv", csv);
  out.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentOpts {
  bool full = false;
  int n_monte = 0;  // 0 keeps the grid default
  std::vector<int> ns, nzs, ms, nls, shot_grid;
  int n = 0;
};

void echo_grid(Emitter& out, std::uint64_t seed, const std::vector<int>& ns,
               const std::vector<int>& nzs, const std::vector<int>& ms, int n_monte) {
  out.record.set("seed", std::to_string(seed));
  out.record.set("ns", join_ints(ns));
  out.record.set("nzs", join_ints(nzs));
  out.record.set("ms", join_ints(ms));
  out.record.set("n_monte", std::to_string(n_monte));
}

void write_scaling_raw_agg(Emitter& out, const std::string& prefix,
                           const std::vector<ScalingARow>& raw,
                           const std::vector<ScalingAAgg>& agg) {
  CsvWriter raw_csv({"n", "n_z", "m", "trial", "j"});
  for (const auto& r : raw)
    raw_csv.row({std::int64_t{r.n}, std::int64_t{r.n_z}, std::int64_t{r.m}, std::int64_t{r.trial},
                 r.j});
  out.csv(prefix + "_raw.csv", raw_csv);

  CsvWriter agg_csv({"n", "n_z", "m", "n_monte", "mean_j", "stderr_j"});
  for (const auto& a : agg)
    agg_csv.row({std::int64_t{a.n}, std::int64_t{a.n_z}, std::int64_t{a.m},
                 std::int64_t{a.n_monte}, a.mean_j, a.stderr_j});
  out.csv(prefix + "_agg.csv", agg_csv);
}

int run_experiment_scaling_a(const GlobalOpts& g, const ExperimentOpts& o) {
  ScalingAConfig cfg;
  cfg.seed = g.seed;
  if (o.full) {
    cfg.ns = {1, 2, 4, 6, 8, 10};
    cfg.nzs = {1, 2, 4, 6, 8};
    cfg.n_monte = 100;
  }
  if (!o.ns.empty()) cfg.ns = o.ns;
  if (!o.nzs.empty()) cfg.nzs = o.nzs;
  if (!o.ms.empty()) cfg.ms = o.ms;
  if (o.n_monte > 0) cfg.n_monte = o.n_monte;

  Emitter out(g.out, "scaling_a");
  echo_grid(out, g.seed, cfg.ns, cfg.nzs, cfg.ms, cfg.n_monte);
  const ScalingAResult result = run_scaling_a(cfg);
  write_scaling_raw_agg(out, "scaling_a", result.raw, result.agg);
  out.finish();
  return kExitOk;
}

int run_experiment_scaling_b(const GlobalOpts& g, const ExperimentOpts& o) {
  ScalingBConfig cfg;
  cfg.seed = g.seed;
  if (o.full) {
    cfg.ns = {1, 2, 4, 6, 8};
    cfg.nzs = {1, 2, 4, 6, 10, 14};
    cfg.n_monte = 100;
  }
  if (!o.ns.empty()) cfg.ns = o.ns;
  if (!o.nzs.empty()) cfg.nzs = o.nzs;
  if (!o.ms.empty()) cfg.ms = o.ms;
  if (o.n_monte > 0) cfg.n_monte = o.n_monte;

  Emitter out(g.out, "scaling_b");
  echo_grid(out, g.seed, cfg.ns, cfg.nzs, cfg.ms, cfg.n_monte);
  const ScalingBResult result = run_scaling_b(cfg);
  write_scaling_raw_agg(out, "scaling_b", result.raw, result.agg);

  CsvWriter fits({"n", "n_z", "a", "b", "c", "sse", "flagged", "j_floor"});
  for (const auto& f : result.fits)
    fits.row({std::int64_t{f.n}, std::int64_t{f.n_z}, f.a, f.b, f.c, f.sse,
              std::int64_t{f.flagged ? 1 : 0}, f.j_floor});
  out.csv("scaling_b_fits.csv", fits);
  out.finish();
  return kExitOk;
}

int run_experiment_shots(const GlobalOpts& g, const ExperimentOpts& o) {
  ShotErrorConfig cfg;
  cfg.seed = g.seed;
  if (o.full) {
    cfg.n = 8;
    cfg.nzs = {1, 2, 4};
    cfg.ms = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    cfg.shot_counts = {128, 256, 512, 1024, 2048, 4096, 8192, 16384};
    cfg.n_monte = 256;
  }
  if (o.n > 0) cfg.n = o.n;
  if (!o.nzs.empty()) cfg.nzs = o.nzs;
  if (!o.ms.empty()) cfg.ms = o.ms;
  if (!o.shot_grid.empty()) cfg.shot_counts = o.shot_grid;
  if (o.n_monte > 0) cfg.n_monte = o.n_monte;

  Emitter out(g.out, "shots");
  out.record.set("seed", std::to_string(g.seed));
  out.record.set("n", std::to_string(cfg.n));
  out.record.set("nzs", join_ints(cfg.nzs));
  out.record.set("ms", join_ints(cfg.ms));
  out.record.set("shot_counts", join_ints(cfg.shot_counts));
  out.record.set("n_monte", std::to_string(cfg.n_monte));
  const ShotErrorResult result = run_shot_error(cfg);

  CsvWriter raw({"n", "n_z", "m", "shots", "trial", "abs_err"});
  for (const auto& r : result.raw)
    raw.row({std::int64_t{r.n}, std::int64_t{r.n_z}, std::int64_t{r.m}, std::int64_t{r.shots},
             std::int64_t{r.trial}, r.abs_err});
  out.csv("shots_raw.csv", raw);

  CsvWriter agg({"n", "n_z", "m", "shots", "n_monte", "mean_abs_err", "stderr_abs_err"});
  for (const auto& a : result.agg)
    agg.row({std::int64_t{a.n}, std::int64_t{a.n_z}, std::int64_t{a.m}, std::int64_t{a.shots},
             std::int64_t{a.n_monte}, a.mean_abs_err, a.stderr_abs_err});
  out.csv("shots_agg.csv", agg);
  out.finish();
  return kExitOk;
}

int run_experiment_gradvar(const GlobalOpts& g, const ExperimentOpts& o) {
  GradVarConfig cfg;
  cfg.seed = g.seed;
  if (o.full) {
    cfg.ns = {2, 4, 6, 8, 10, 12, 14};
    cfg.nls = {10, 25, 50, 75, 100, 200};
    cfg.ms = {2, 4, 8, 16};
    cfg.n_monte = 300;
  }
  if (!o.ns.empty()) cfg.ns = o.ns;
  if (!o.nls.empty()) cfg.nls = o.nls;
  if (!o.ms.empty()) cfg.ms = o.ms;
  if (o.n_monte > 0) cfg.n_monte = o.n_monte;

  Emitter out(g.out, "gradvar");
  out.record.set("seed", std::to_string(g.seed));
  out.record.set("ns", join_ints(cfg.ns));
  out.record.set("nls", join_ints(cfg.nls));
  out.record.set("ms", join_ints(cfg.ms));
  out.record.set("n_monte", std::to_string(cfg.n_monte));
  const GradVarResult result = run_grad_var(cfg);

  CsvWriter raw({"cost", "n", "n_layers", "m", "trial", "grad"});
  for (const auto& r : result.raw)
    raw.row({r.cost, std::int64_t{r.n}, std::int64_t{r.n_l}, std::int64_t{r.m},
             std::int64_t{r.trial}, r.grad});
  out.csv("gradvar_raw.csv", raw);

  CsvWriter agg({"cost", "n", "n_layers", "m", "n_monte", "variance"});
  for (const auto& a : result.agg)
    agg.row({a.cost, std::int64_t{a.n}, std::int64_t{a.n_l}, std::int64_t{a.m},
             std::int64_t{a.n_monte}, a.variance});
  out.csv("gradvar_agg.csv", agg);
  out.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// selftest

bool report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << ": " << detail << "\n";
  return ok;
}

int run_selftest(const GlobalOpts& g) {
  bool all_ok = true;
  Rng root(g.seed);

  {  // Parameter-shift gradients against central finite differences.
    double max_err = 0.0;
    for (int k = 0; k < 10; ++k) {
      Rng rng = root.stream(1, k);
      const int n = 2 + static_cast<int>(rng.below(3));
      const int layers = 1 + static_cast<int>(rng.below(3));
      const int nz = 1 + static_cast<int>(rng.below(2));
      const CircuitSpec spec = build_hea(n, layers, nz, Entangler::CZ, rng);
      const Statevector psi = gen_hard_target_ensemble(n, 1, rng).states[0];
      auto zs = sample_latent_batch(nz, 1, rng);
      const GroundCost cost = k % 2 == 0 ? GroundCost::exact_local() : GroundCost::exact_global();
      const auto grad = ground_cost_grad(psi, spec, zs[0], Wrt::Theta, cost, rng);
      for (int s = 0; s < spec.param_count(); ++s) {
        const double fd = fd_ground_cost_grad(psi, spec, zs[0], Wrt::Theta, s, 1e-4, cost);
        max_err = std::max(max_err, std::abs(grad.d[static_cast<std::size_t>(s)] - fd));
      }
    }
    all_ok &= report("parameter shift vs finite difference", max_err < 1e-6,
                     "max abs err " + fmt_double(max_err));
  }

  {  // Transport solver against the permutation oracle on square instances.
    double max_gap = 0.0;
    for (int k = 0; k < 50; ++k) {
      Rng rng = root.stream(2, k);
      const int m = 2 + static_cast<int>(rng.below(4));
      CostMatrix cost;
      cost.rows = cost.cols = m;
      cost.v.resize(static_cast<std::size_t>(m) * m);
      for (double& c : cost.v) c = rng.uniform();
      const double got = solve_ot_uniform(cost).loss;
      const double want = oracle::permutation_minimum(cost);
      max_gap = std::max(max_gap, std::abs(got - want));
    }
    all_ok &= report("transport vs permutation oracle", max_gap < 1e-12,
                     "max abs gap " + fmt_double(max_gap));
  }

  {  // Weighted rectangular instances against basic-solution enumeration.
    double max_gap = 0.0;
    for (int k = 0; k < 20; ++k) {
      Rng rng = root.stream(3, k);
      const int rows = k % 2 == 0 ? 2 : 3;
      const int cols = 5 - rows;
      CostMatrix cost;
      cost.rows = rows;
      cost.cols = cols;
      cost.v.resize(static_cast<std::size_t>(rows) * cols);
      for (double& c : cost.v) c = rng.uniform();
      std::vector<double> p(rows), q(cols);
      double sp = 0.0, sq = 0.0;
      for (double& x : p) sp += (x = 0.1 + rng.uniform());
      for (double& x : q) sq += (x = 0.1 + rng.uniform());
      for (double& x : p) x /= sp;
      for (double& x : q) x /= sq;
      const double got = solve_ot(cost, p, q).loss;
      const double want = oracle::basic_solution_minimum(cost, p, q);
      max_gap = std::max(max_gap, std::abs(got - want));
    }
    all_ok &= report("transport vs basic-solution enumeration", max_gap < 1e-12,
                     "max abs gap " + fmt_double(max_gap));
  }

  {  // Loss nonnegativity and self-distance zero.
    double min_loss = 1e300;
    double max_self = 0.0;
    for (int k = 0; k < 50; ++k) {
      Rng rng = root.stream(4, k);
      const int n = 2 + static_cast<int>(rng.below(2));
      const CircuitSpec spec = build_hea(n, 2, 1, Entangler::CZ, rng);
      const Ensemble ens = gen_equator_ensemble(n, 4, rng);
      auto zs = sample_latent_batch(1, 4, rng);
      const Rng mat_rng = rng.stream(7);
      min_loss = std::min(
          min_loss, evaluate_otl(ens, spec, zs, GroundCost::exact_local(), mat_rng).solution.loss);
      std::vector<LatentVector> z0{zs[0]};
      Ensemble self;
      self.states.push_back(run_circuit(spec, zs[0]));
      self.weights.push_back(1.0);
      max_self = std::max(
          max_self,
          evaluate_otl(self, spec, z0, GroundCost::exact_local(), mat_rng).solution.loss);
    }
    const bool ok = min_loss >= 0.0 && max_self <= 1e-9;
    all_ok &= report("loss nonnegative and zero on itself", ok,
                     "min loss " + fmt_double(min_loss) + ", max self " + fmt_double(max_self));
  }

  {  // Sampled marginals track exact marginals.
    double max_dev = 0.0;
    for (int k = 0; k < 20; ++k) {
      Rng rng = root.stream(5, k);
      const int n = 3;
      const CircuitSpec spec = build_hea(n, 2, 1, Entangler::CZ, rng);
      auto zs = sample_latent_batch(1, 1, rng);
      const Statevector psi = run_circuit(spec, zs[0]);
      const auto exact = local_marginals(psi, spec, zs[0]);
      Rng shot_rng = rng.stream(9);
      const auto sampled = sampled_local_marginals(psi, spec, zs[0], 8192, shot_rng);
      for (int q = 0; q < n; ++q)
        max_dev = std::max(max_dev, std::abs(exact[static_cast<std::size_t>(q)] -
                                             sampled[static_cast<std::size_t>(q)]));
    }
    all_ok &= report("sampled marginals near exact", max_dev < 0.05,
                     "max abs deviation " + fmt_double(max_dev));
  }

  std::cout << (all_ok ? "selftest passed\n" : "selftest FAILED\n");
  return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-variable state-ensemble modeling with transport losses"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1);

  GlobalOpts g;
  if (const char* env = std::getenv("QOTL_OUTPUT_DIR")) g.out = env;
  app.add_option("--seed", g.seed, "Master seed; every random stream derives from it")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory (default from QOTL_OUTPUT_DIR)")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker pool size; 0 keeps the runtime default")
      ->capture_default_str();

  std::function<int()> action;

  TrainOpts to;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Fit a circuit model to a state ensemble; writes checkpoint.txt and "
               "train_trace.csv (iteration, loss, global_loss, grad_norm, eval/shot counters)");
  train_cmd->fallthrough();
  train_cmd->add_option("--n", to.n, "Qubit count")->required();
  train_cmd->add_option("--layers", to.layers, "Circuit depth; 0 picks 3 + nz/n")
      ->capture_default_str();
  train_cmd->add_option("--nz", to.nz, "Latent dimension")->capture_default_str();
  train_cmd->add_option("--m", to.m, "Ensemble size")->capture_default_str();
  train_cmd->add_option("--mg", to.mg, "Latent batch size; 0 matches --m")->capture_default_str();
  train_cmd->add_option("--iterations", to.iterations, "Optimizer iterations")
      ->capture_default_str();
  train_cmd->add_option("--lr", to.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--restarts", to.restarts, "Centered-init candidates; lowest final loss wins")
      ->capture_default_str();
  train_cmd->add_option("--shots", to.shots, "Shots per cost evaluation; 0 is exact")
      ->capture_default_str();
  train_cmd->add_option("--cost", to.cost, "Ground cost")
      ->check(CLI::IsMember({"local", "global"}))
      ->capture_default_str();
  train_cmd->add_option("--family", to.family, "Circuit family")
      ->check(CLI::IsMember({"hea", "ala"}))
      ->capture_default_str();
  train_cmd->add_option("--block-size", to.block_size, "Entangling block width (ala)")
      ->capture_default_str();
  train_cmd->add_option("--entangler", to.entangler, "Two-qubit gate")
      ->check(CLI::IsMember({"cz", "cx"}))
      ->capture_default_str();
  train_cmd->add_option("--dataset", to.dataset, "Training ensemble")
      ->check(CLI::IsMember({"equator", "localized", "hard"}))
      ->capture_default_str();
  train_cmd->add_option("--mu", to.mu, "Localized dataset polar mean")->capture_default_str();
  train_cmd->add_option("--sigma", to.sigma, "Localized dataset polar spread")
      ->capture_default_str();
  train_cmd->add_option("--phase-lo", to.phase_lo, "Localized dataset phase lower bound")
      ->capture_default_str();
  train_cmd->add_option("--phase-hi", to.phase_hi, "Localized dataset phase upper bound")
      ->capture_default_str();
  train_cmd->add_flag("--record-global", to.record_global,
                      "Also record the exact trace-distance loss per iteration");
  train_cmd->callback([&] { action = [&] { return run_train(g, to); }; });

  AnomalyOpts ao;
  CLI::App* anomaly_cmd = app.add_subcommand(
      "anomaly", "Score test states against a trained model; writes scores.csv "
                 "(theta_t, phi_t, score, argmin_z*, restarts_used)");
  anomaly_cmd->fallthrough();
  anomaly_cmd->add_option("--checkpoint", ao.checkpoint, "Model checkpoint to score against")
      ->required();
  anomaly_cmd->add_option("--theta-min", ao.theta_min, "Test grid polar start")
      ->capture_default_str();
  anomaly_cmd->add_option("--theta-max", ao.theta_max, "Test grid polar end (inclusive)")
      ->capture_default_str();
  anomaly_cmd->add_option("--theta-step", ao.theta_step, "Test grid polar step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  anomaly_cmd->add_option("--phi", ao.phis, "Test grid phases")
      ->delimiter(',')
      ->capture_default_str();
  anomaly_cmd->add_option("--iterations", ao.iterations, "Descent iterations per restart")
      ->capture_default_str();
  anomaly_cmd->add_option("--step", ao.step, "Descent step size")->capture_default_str();
  anomaly_cmd->add_option("--restarts", ao.restarts, "Latent restarts per test state")
      ->capture_default_str();
  anomaly_cmd->add_option("--shots", ao.shots, "Shots per cost evaluation; 0 is exact")
      ->capture_default_str();
  anomaly_cmd->add_option("--cost", ao.cost, "Ground cost")
      ->check(CLI::IsMember({"local", "global"}))
      ->capture_default_str();
  anomaly_cmd->add_option("--init", ao.init, "Restart placement")
      ->check(CLI::IsMember({"random", "grid"}))
      ->capture_default_str();
  anomaly_cmd->add_flag("--with-theory", ao.with_theory,
                        "Add the closed-form equator reference score column");
  anomaly_cmd->add_option("--threshold", ao.threshold, "Add a 0/1 anomalous column at this score")
      ->each([&](const std::string&) { ao.has_threshold = true; });
  anomaly_cmd->callback([&] { action = [&] { return run_anomaly(g, ao); }; });

  BlochOpts bo;
  CLI::App* bloch_cmd = app.add_subcommand(
      "bloch", "Sweep the first latent feature and project model outputs onto the "
               "|0...0>,|1...1> Bloch sphere; writes bloch.csv (z, x, y, z, residual)");
  bloch_cmd->fallthrough();
  bloch_cmd->add_option("--checkpoint", bo.checkpoint, "Model checkpoint to sweep")->required();
  bloch_cmd->add_option("--points", bo.points, "Sweep points over z in [0, 1]")
      ->capture_default_str();
  bloch_cmd->callback([&] { action = [&] { return run_bloch(g, bo); }; });

  ExperimentOpts eo;
  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "Run a study grid; writes raw and aggregated CSVs");
  exp_cmd->fallthrough();
  exp_cmd->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->fallthrough();
    cmd->add_flag("--full", eo.full, "Use the full publication grid instead of the quick one");
    cmd->add_option("--n-monte", eo.n_monte, "Trials per cell; 0 keeps the grid default")
        ->capture_default_str();
  };
  CLI::App* exp_a = exp_cmd->add_subcommand(
      "scaling-a", "Shared-family loss vs ensemble size; scaling_a_raw.csv has "
                   "n, n_z, m, trial, j");
  add_common(exp_a);
  exp_a->add_option("--ns", eo.ns, "Qubit counts")->delimiter(',');
  exp_a->add_option("--nzs", eo.nzs, "Latent dimensions")->delimiter(',');
  exp_a->add_option("--ms", eo.ms, "Ensemble sizes")->delimiter(',');
  exp_a->callback([&] { action = [&] { return run_experiment_scaling_a(g, eo); }; });

  CLI::App* exp_b = exp_cmd->add_subcommand(
      "scaling-b", "Distinct-family loss vs ensemble size with power-law fits; "
                   "scaling_b_fits.csv has n, n_z, a, b, c, sse, flagged, j_floor");
  add_common(exp_b);
  exp_b->add_option("--ns", eo.ns, "Qubit counts")->delimiter(',');
  exp_b->add_option("--nzs", eo.nzs, "Latent dimensions")->delimiter(',');
  exp_b->add_option("--ms", eo.ms, "Ensemble sizes")->delimiter(',');
  exp_b->callback([&] { action = [&] { return run_experiment_scaling_b(g, eo); }; });

  CLI::App* exp_s = exp_cmd->add_subcommand(
      "shots", "Sampled-loss error vs shot budget; shots_raw.csv has "
               "n, n_z, m, shots, trial, abs_err");
  add_common(exp_s);
  exp_s->add_option("--n", eo.n, "Qubit count; 0 keeps the grid default");
  exp_s->add_option("--nzs", eo.nzs, "Latent dimensions")->delimiter(',');
  exp_s->add_option("--ms", eo.ms, "Ensemble sizes")->delimiter(',');
  exp_s->add_option("--shot-grid", eo.shot_grid, "Shot budgets")->delimiter(',');
  exp_s->callback([&] { action = [&] { return run_experiment_shots(g, eo); }; });

  CLI::App* exp_g = exp_cmd->add_subcommand(
      "gradvar", "First-slot gradient variance for both ground costs; gradvar_raw.csv "
                 "has cost, n, n_layers, m, trial, grad");
  add_common(exp_g);
  exp_g->add_option("--ns", eo.ns, "Qubit counts")->delimiter(',');
  exp_g->add_option("--nls", eo.nls, "Circuit depths")->delimiter(',');
  exp_g->add_option("--ms", eo.ms, "Ensemble sizes")->delimiter(',');
  exp_g->callback([&] { action = [&] { return run_experiment_gradvar(g, eo); }; });

  CLI::App* self_cmd =
      app.add_subcommand("selftest", "Check the solver and gradients against independent oracles");
  self_cmd->fallthrough();
  self_cmd->callback([&] { action = [&] { return run_selftest(g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (g.threads > 0) par::set_max_threads(g.threads);

  try {
    return action();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
