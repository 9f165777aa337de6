#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "occnum/analytic.hpp"
#include "occnum/dsl.hpp"
#include "occnum/errors.hpp"
#include "occnum/export.hpp"
#include "occnum/meanfield.hpp"
#include "occnum/solver.hpp"
#include "occnum/ssa.hpp"

namespace fs = std::filesystem;
using namespace occnum;

namespace {

struct ModelOptions {
  std::string model;
  std::string file;
  double mu = 1.0, omega = 0.0, l1 = 1.0, l2 = 1.0;
  std::string caps_text;
  long long manifold_total = -1;
  std::string init_text;
  std::string out_dir = ".";
  int threads = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions& opt, bool with_lattice = true) {
  cmd->add_option("--model", opt.model,
                  "built-in model: oscillator | lvm | lvm_truncated | cannibal");
  cmd->add_option("--file", opt.file, "model file (.occ)")->excludes("--model");
  cmd->add_option("--mu", opt.mu, "oscillator pump parameter");
  cmd->add_option("--omega", opt.omega, "oscillator frequency (mean-field only)");
  cmd->add_option("--l1", opt.l1, "first jump coefficient");
  cmd->add_option("--l2", opt.l2, "second jump coefficient");
  if (with_lattice) {
    cmd->add_option("--caps", opt.caps_text, "per-mode caps, e.g. 56,56 (default: model heuristic)");
    cmd->add_option("--N", opt.manifold_total, "conserved total (manifold restriction)");
  }
  cmd->add_option("--out", opt.out_dir, "output directory (default .)");
  cmd->add_option("--threads", opt.threads, "worker cap (default OCCNUM_THREADS or all)");
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      throw CLI::ValidationError(std::string(what) + ": expected a comma-separated integer list");
    }
  }
  if (out.empty())
    throw CLI::ValidationError(std::string(what) + ": empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw CLI::ValidationError(std::string(what) + ": expected a comma-separated real list");
    }
  }
  return out;
}

struct LoadedModel {
  ModelSpec spec;
  std::optional<BuiltinModel> kind;
  std::vector<double> params;
};

LoadedModel load_model(const ModelOptions& opt) {
  if (!opt.file.empty()) {
    std::ifstream in(opt.file);
    if (!in) throw CLI::ValidationError("cannot open model file: " + opt.file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return {parse_model(buffer.str()), {}, {}};
  }
  if (opt.model == "oscillator")
    return {builtin_model(BuiltinModel::Oscillator, {opt.mu, opt.omega}),
            BuiltinModel::Oscillator,
            {opt.mu, opt.omega}};
  if (opt.model == "lvm")
    return {builtin_model(BuiltinModel::LotkaVolterra, {opt.l1, opt.l2}),
            BuiltinModel::LotkaVolterra,
            {opt.l1, opt.l2}};
  if (opt.model == "lvm_truncated")
    return {builtin_model(BuiltinModel::LotkaVolterraTruncated, {}),
            BuiltinModel::LotkaVolterraTruncated,
            {}};
  if (opt.model == "cannibal")
    return {builtin_model(BuiltinModel::Cannibal, {opt.l1, opt.l2}),
            BuiltinModel::Cannibal,
            {opt.l1, opt.l2}};
  if (opt.model.empty())
    throw CLI::ValidationError("one of --model or --file is required");
  throw CLI::ValidationError("unknown model: " + opt.model);
}

OccState parse_init(const ModelOptions& opt, const ModelSpec& spec) {
  if (opt.init_text.empty())
    throw CLI::ValidationError("--init is required (e.g. --init 2,0)");
  const auto init = parse_int_list(opt.init_text, "--init");
  if (static_cast<int>(init.size()) != spec.mode_count())
    throw CLI::ValidationError("--init length does not match the mode count");
  return init;
}

// Lattice selection: explicit caps win; a conserved model with --N (or an
// --init total) lives on its manifold; otherwise the built-in cap heuristic.
std::shared_ptr<const TruncatedLattice> make_lattice(const ModelOptions& opt,
                                                     const LoadedModel& model) {
  const auto conserved = conserved_totals(model.spec);
  long long total = opt.manifold_total;
  if (total < 0 && !conserved.empty() && !opt.init_text.empty()) {
    const auto init = parse_int_list(opt.init_text, "--init");
    total = 0;
    for (std::size_t i = 0; i < init.size(); ++i)
      total += static_cast<long long>(conserved.front()[i]) * init[i];
  }

  std::vector<int> caps;
  if (!opt.caps_text.empty()) {
    caps = parse_int_list(opt.caps_text, "--caps");
  } else if (!conserved.empty() && total >= 0) {
    caps.assign(model.spec.mode_count(), static_cast<int>(total));
  } else if (model.kind) {
    caps = default_caps(*model.kind, model.params, total);
  } else {
    throw CLI::ValidationError("--caps is required for file models");
  }

  std::optional<ManifoldConstraint> manifold;
  if (!conserved.empty() && total >= 0)
    manifold = ManifoldConstraint{conserved.front(), total};
  return std::make_shared<const TruncatedLattice>(
      enumerate_states(model.spec, caps, manifold));
}

std::ofstream open_out(const ModelOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  const fs::path path = fs::path(opt.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CLI::ValidationError("cannot write " + path.string());
  std::cout << "wrote " << path.string() << "\n";
  return out;
}

int run_compile(const ModelOptions& opt) {
  const auto model = load_model(opt);
  const auto lattice = make_lattice(opt, model);
  const auto gen = build_generator(model.spec, *lattice, opt.threads);
  auto out = open_out(opt, "generator.txt");
  dump_triplets(out, gen);
  std::cout << "states " << gen.dim << ", nonzeros " << gen.val.size()
            << ", max |entry| " << format_g17(gen.max_abs_entry) << "\n";
  return 0;
}

int run_stationary(const ModelOptions& opt) {
  const auto model = load_model(opt);
  const auto lattice = make_lattice(opt, model);
  const auto gen = build_generator(model.spec, *lattice, opt.threads);
  const auto dist = stationary(gen, lattice);
  {
    auto out = open_out(opt, "stationary.csv");
    write_distribution_csv(out, dist);
  }
  {
    auto out = open_out(opt, "moments.json");
    write_moments_json(out, moments(dist));
  }
  std::cout << "boundary tail mass " << format_g17(boundary_tail_mass(model.spec, dist))
            << "\n";
  return 0;
}

int run_evolve(const ModelOptions& opt, double t) {
  const auto model = load_model(opt);
  const auto lattice = make_lattice(opt, model);
  const auto gen = build_generator(model.spec, *lattice, opt.threads);
  const auto p0 = point_mass(lattice, parse_init(opt, model.spec));
  const auto dist = evolve(gen, p0, t, opt.threads);
  {
    auto out = open_out(opt, "distribution.csv");
    write_distribution_csv(out, dist);
  }
  auto out = open_out(opt, "moments.json");
  write_moments_json(out, moments(dist));
  return 0;
}

int run_sample(const ModelOptions& opt, double t, std::uint64_t count,
               std::uint64_t seed) {
  const auto model = load_model(opt);
  const auto emp = sample_trajectories(model.spec, parse_init(opt, model.spec), t,
                                       count, seed, opt.threads);
  auto out = open_out(opt, "histogram.csv");
  write_histogram_csv(out, emp);
  std::cout << "trajectories " << emp.trajectories << ", support " << emp.counts.size()
            << "\n";
  return 0;
}

int run_moments(const ModelOptions& opt, std::optional<double> t) {
  const auto model = load_model(opt);
  const auto lattice = make_lattice(opt, model);
  const auto gen = build_generator(model.spec, *lattice, opt.threads);
  DiagonalDistribution dist =
      t ? evolve(gen, point_mass(lattice, parse_init(opt, model.spec)), *t, opt.threads)
        : stationary(gen, lattice);
  auto out = open_out(opt, "moments.json");
  write_moments_json(out, moments(dist));
  return 0;
}

int run_meanfield(const ModelOptions& opt, double t, int samples) {
  const auto model = load_model(opt);
  const auto init = parse_init(opt, model.spec);
  const std::vector<double> n0(init.begin(), init.end());
  const auto traj = integrate_meanfield(model.spec, n0, t, samples);
  auto out = open_out(opt, "trajectory.csv");
  write_trajectory_csv(out, traj);
  return 0;
}

int run_analytic(const ModelOptions& opt, const std::string& table,
                 const std::string& mu_list, const std::string& n_list, double kappa) {
  std::ostringstream csv;
  if (table == "oscillator-moments") {
    csv << "# schema: occnum.analytic.oscillator-moments/1\n";
    csv << "mu,mean,variance,rel_fluct,mean_large_mu,variance_large_mu,"
           "mean_small_mu,variance_small_mu\n";
    for (double mu : parse_real_list(mu_list, "--mu")) {
      const auto m = oscillator_moments(mu);
      csv << format_g17(mu) << "," << format_g17(m.mean) << ","
          << format_g17(m.variance) << "," << format_g17(m.rel_fluct) << ","
          << format_g17(m.mean_large_mu) << "," << format_g17(m.variance_large_mu)
          << "," << format_g17(m.mean_small_mu) << ","
          << format_g17(m.variance_small_mu) << "\n";
    }
  } else if (table == "cannibal-ratio") {
    csv << "# schema: occnum.analytic.cannibal-ratio/1\n";
    csv << "N,kappa,ratio\n";
    for (int N : parse_int_list(n_list, "--N")) {
      csv << N << "," << format_g17(kappa) << "," << format_g17(cannibal_ratio(N, kappa))
          << "\n";
    }
  } else {
    throw CLI::ValidationError("unknown table: " + table +
                               " (oscillator-moments | cannibal-ratio)");
  }
  std::cout << csv.str();
  return 0;
}

struct VerifyReport {
  int checked = 0, failed = 0;

  void row(const std::string& name, double value, double bound) {
    const bool ok = value <= bound;
    ++checked;
    if (!ok) ++failed;
    std::printf("%-4s %-38s %12.3e <= %.1e\n", ok ? "PASS" : "FAIL", name.c_str(), value,
                bound);
  }
};

int run_verify(const ModelOptions& opt) {
  const auto model = load_model(opt);
  const auto lattice = make_lattice(opt, model);
  const auto gen = build_generator(model.spec, *lattice, opt.threads);
  VerifyReport report;

  {  // structural checks shared by every model
    double worst = 0.0;
    for (double s : gen.column_sums()) worst = std::max(worst, std::abs(s));
    report.row("generator column sums", worst, 1e-12 * std::max(1.0, gen.max_abs_entry));

    const auto roundtrip = parse_model(serialize_model(model.spec));
    report.row("model file round-trip", roundtrip == model.spec ? 0.0 : 1.0, 0.0);

    DiagonalDistribution p0{lattice, std::vector<double>(lattice->size(),
                                                         1.0 / lattice->size())};
    const auto p1 = evolve(gen, p0, 1.0, opt.threads);
    double sum = 0.0;
    for (double p : p1.p) sum += p;
    report.row("evolve mass conservation", std::abs(sum - 1.0), 1e-12);
    const auto two_step = evolve(gen, evolve(gen, p0, 0.4, opt.threads), 0.6, opt.threads);
    report.row("evolve semigroup (TV)", tv_exact(two_step, p1), 1e-9);
  }

  if (model.kind == BuiltinModel::Oscillator) {
    const double mu = model.params[0];
    const auto dist = stationary(gen, lattice);
    const auto mom = moments(dist);
    const auto phi = oscillator_moments(mu);
    report.row("stationary mean vs Phi series",
               std::abs(mom.mean[0] / phi.mean - 1.0), 1e-6);
    report.row("stationary variance vs Phi series",
               std::abs(mom.variance[0] / phi.variance - 1.0), 1e-6);
    const std::vector<double> u{0.0, 0.5, 1.0};
    report.row("stationary GF equation residual", gf_ode_residual(dist, mu, u), 1e-8);
    const auto pts = random_complex_points(1, 100, 3.0, 12345);
    report.row("decomposition residual", faq_residual(*model.kind, model.params, pts),
               1e-12);
    report.row("boundary tail mass", boundary_tail_mass(model.spec, dist), 1e-8);
  } else if (model.kind == BuiltinModel::LotkaVolterra) {
    const auto dist = stationary(gen, lattice);
    const auto res = moment_identity_residuals(dist, model.params[0], model.params[1]);
    report.row("moment identity a", std::abs(res.r_a), 1e-5);
    report.row("moment identity b", std::abs(res.r_b), 1e-5);
    report.row("mean ratio relation", std::abs(res.ratio_lhs - res.ratio_rhs), 1e-5);
    const auto pts = random_complex_points(2, 100, 3.0, 12345);
    report.row("decomposition residual", faq_residual(*model.kind, model.params, pts),
               1e-12);
    report.row("boundary tail mass", boundary_tail_mass(model.spec, dist), 1e-6);
  } else if (model.kind == BuiltinModel::LotkaVolterraTruncated) {
    const long long N = lattice->manifold ? lattice->manifold->total
                                          : static_cast<long long>(lattice->caps[0]);
    OccState init(2, 0);
    init[0] = static_cast<int>(N);
    const auto drained = evolve(gen, point_mass(lattice, init), 10.0, opt.threads);
    const auto mom = moments(drained);
    report.row("predators absorb everything", std::abs(mom.mean[0]), 1e-6);
    if (lattice->manifold) {
      // compiled manifold generator = 2x the coefficient-flow matrix
      const auto L = truncated_lvm_generator(static_cast<int>(N),
                                             TruncatedLvmVariant::Exact);
      double worst = 0.0;
      for (int r = 0; r < gen.dim; ++r)
        for (int c = 0; c < gen.dim; ++c) {
          const int jr = static_cast<int>(N) - lattice->states[r][0];
          const int jc = static_cast<int>(N) - lattice->states[c][0];
          worst = std::max(worst, std::abs(gen.entry(r, c) - 2.0 * L(jr, jc)));
        }
      report.row("generator = 2x coefficient flow", worst, 0.0);
    }
  } else if (model.kind == BuiltinModel::Cannibal) {
    const auto dist = stationary(gen, lattice);
    report.row("detailed balance", detailed_balance_residual(gen, dist), 1e-10);
    const long long N = lattice->manifold ? lattice->manifold->total : lattice->caps[0];
    const auto gf = cannibal_stationary(CannibalParams::from_lambdas(
        static_cast<int>(N), model.params[0], model.params[1]));
    double worst = 0.0;
    for (std::size_t s = 0; s < dist.p.size(); ++s)
      worst = std::max(worst,
                       std::abs(dist.p[s] - gf.coeff_u_pow(lattice->states[s][0])));
    report.row("stationary law vs closed form", worst, 1e-10);
    const auto pts = random_complex_points(2, 100, 3.0, 12345);
    report.row("decomposition residual", faq_residual(*model.kind, model.params, pts),
               1e-12);
  }

  std::printf("%d checks, %d failed\n", report.checked, report.failed);
  return report.failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occnum: integer-occupation jump models compiled to master equations"};
  app.require_subcommand(1);

  ModelOptions opt;
  double t = 1.0;
  std::uint64_t count = 10000, seed = 1;
  std::optional<double> moments_t;
  int mf_samples = 101;
  std::string table, mu_list = "0.01,1,50", n_list = "50,100,200";
  double kappa = 0.5;

  auto* compile_cmd = app.add_subcommand("compile", "dump the generator as triplets");
  add_model_options(compile_cmd, opt);

  auto* stationary_cmd = app.add_subcommand("stationary", "stationary distribution and moments");
  add_model_options(stationary_cmd, opt);

  auto* evolve_cmd = app.add_subcommand("evolve", "transient distribution at time t");
  add_model_options(evolve_cmd, opt);
  evolve_cmd->add_option("--t", t, "evolution time")->required();
  evolve_cmd->add_option("--init", opt.init_text, "initial state, e.g. 2,0")->required();

  auto* sample_cmd = app.add_subcommand("sample", "Gillespie endpoint histogram");
  add_model_options(sample_cmd, opt);
  sample_cmd->add_option("--t", t, "trajectory end time")->required();
  sample_cmd->add_option("--count", count, "trajectory count");
  sample_cmd->add_option("--seed", seed, "base seed");
  sample_cmd->add_option("--init", opt.init_text, "initial state")->required();

  auto* moments_cmd = app.add_subcommand("moments", "moment summary (stationary, or at --t)");
  add_model_options(moments_cmd, opt);
  auto* mt = moments_cmd->add_option("--t", moments_t, "transient time");
  moments_cmd->add_option("--init", opt.init_text, "initial state (with --t)")->needs(mt);

  auto* meanfield_cmd = app.add_subcommand("meanfield", "deterministic trajectory");
  add_model_options(meanfield_cmd, opt, /*with_lattice=*/false);
  meanfield_cmd->add_option("--t", t, "integration time")->required();
  meanfield_cmd->add_option("--init", opt.init_text, "initial state")->required();
  meanfield_cmd->add_option("--samples", mf_samples, "trajectory sample count");

  auto* verify_cmd = app.add_subcommand("verify", "run the model's invariant checks");
  add_model_options(verify_cmd, opt);

  auto* analytic_cmd = app.add_subcommand("analytic", "closed-form tables");
  analytic_cmd->add_option("--table", table, "oscillator-moments | cannibal-ratio")
      ->required();
  analytic_cmd->add_option("--mu", mu_list, "mu values (comma list)");
  analytic_cmd->add_option("--N", n_list, "N values (comma list)");
  analytic_cmd->add_option("--kappa", kappa, "rate ratio a/b in (0,1]");

  try {
    app.parse(argc, argv);
    if (compile_cmd->parsed()) return run_compile(opt);
    if (stationary_cmd->parsed()) return run_stationary(opt);
    if (evolve_cmd->parsed()) return run_evolve(opt, t);
    if (sample_cmd->parsed()) return run_sample(opt, t, count, seed);
    if (moments_cmd->parsed()) return run_moments(opt, moments_t);
    if (meanfield_cmd->parsed()) return run_meanfield(opt, t, mf_samples);
    if (verify_cmd->parsed()) return run_verify(opt);
    if (analytic_cmd->parsed()) return run_analytic(opt, table, mu_list, n_list, kappa);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "model file error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
