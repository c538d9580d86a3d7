#pragma once

// The experiments the command-line runner can execute. Each one fills a
// ResultTable and lists the rows that broke a tolerance.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "bbgky/cumulants.hpp"
#include "bbgky/harness/config.hpp"
#include "bbgky/harness/result_table.hpp"
#include "bbgky/hartree.hpp"
#include "bbgky/hierarchies.hpp"
#include "bbgky/kinetic.hpp"
#include "bbgky/meanfield.hpp"
#include "bbgky/random.hpp"

namespace bbgky::harness {

struct CumulantCheckParams {
  int n_max = 4;
  std::vector<double> times{0.1, 1.0};
  std::vector<double> order_times{1e-1, 1e-2, 1e-3, 1e-4};
  double inversion_tol = 1e-9;
  double slope_tol = 0.3;
};

struct BbgkyDemoParams {
  int particles = 3;
  std::vector<double> times{0.25, 0.5, 1.0};
  double exactness_tol = 1e-8;
};

struct DualityCheckParams {
  int particles = 3;
  std::vector<double> times{0.25, 0.5, 1.0};
  int samples = 20;
  double pairing_tol = 1e-8;
};

struct GkeCheckParams {
  double trace = 0.1;
  std::vector<double> times{0.25, 0.5};
  int truncation = 1;
  int reference_order = 4;
  double equivalence_tol = 5e-3;
  double trace_tol = 1e-8;
};

struct MeanfieldSweepParams {
  std::vector<double> particles{2, 4, 6, 8};
  std::vector<double> levels{1, 2};
  double horizon = 1.0;
  std::vector<double> correlation_epsilons{0.5, 0.25, 0.125};
  int correlation_order = 3;
  double slope_tol = 0.3;
};

struct HartreeParams {
  int points = 16;
  double length = 2 * std::numbers::pi;
  std::string kernel = "gaussian";  // gaussian | contact | none
  double strength = 1.0;
  double alpha = 2.0;               // gaussian: strength * exp(-alpha r^2)
  std::string initial = "bump";     // bump | plane
  int mode = 1;
  double dt = 2e-4;
  double horizon = 1.0;
  int samples = 4;
  bool vlasov_check = true;
  double mass_tol = 1e-10;
  double energy_tol = 1e-8;
  double vlasov_tol = 1e-5;
};

using ExperimentParams = std::variant<CumulantCheckParams, BbgkyDemoParams, DualityCheckParams, GkeCheckParams,
                                      MeanfieldSweepParams, HartreeParams>;

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"cumulant-check", "bbgky-demo",      "duality-check",
                                              "gke-check",      "meanfield-sweep", "hartree"};
  return names;
}

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  ModelConfig model;
  ExperimentParams params;
  std::filesystem::path output_dir = "results";
  std::string output_stem;
  std::string config_hash;  // SHA-256 of the config file bytes
};

namespace detail {

inline void require(const IniDocument& doc, const std::string& key, bool ok, const std::string& message) {
  if (!ok) throw doc.error(key, message);
}

inline int read_count(const IniDocument& doc, const std::string& key, int fallback, int lo, int hi) {
  const long v = doc.get_int(key, fallback);
  require(doc, key, v >= lo && v <= hi,
          "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(v));
  return static_cast<int>(v);
}

inline double read_positive(const IniDocument& doc, const std::string& key, double fallback) {
  const double v = doc.get_double(key, fallback);
  require(doc, key, v > 0.0 && std::isfinite(v), "must be positive");
  return v;
}

inline std::vector<double> read_times(const IniDocument& doc, const std::string& key, std::vector<double> fallback) {
  auto v = doc.get_list(key, std::move(fallback));
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(doc, key, v[i] > 0.0 && std::isfinite(v[i]), "times must be positive");
    require(doc, key, i == 0 || v[i] > v[i - 1], "times must be strictly ascending");
  }
  return v;
}

inline std::vector<double> read_integers(const IniDocument& doc, const std::string& key, std::vector<double> fallback,
                                         int lo, int hi) {
  auto v = doc.get_list(key, std::move(fallback));
  for (double x : v)
    require(doc, key, x == std::floor(x) && x >= lo && x <= hi,
            "entries must be integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

inline Matrix read_matrix_file(const IniDocument& doc, const std::string& key, int d) {
  auto path = std::filesystem::path(doc.get_string(key));
  if (path.is_relative()) path = doc.base_dir() / path;
  require(doc, key, std::filesystem::exists(path), "referenced file does not exist: " + path.string());
  std::istringstream in(read_file(path));
  Matrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      double v = 0.0;
      require(doc, key, static_cast<bool>(in >> v), "expected " + std::to_string(d * d) + " numbers in " + path.string());
      m(r, c) = v;
    }
  std::string extra;
  require(doc, key, !(in >> extra), "trailing data in " + path.string());
  return m;
}

inline ModelConfig read_model(const IniDocument& doc) {
  const int d = read_count(doc, "model.d", 2, 1, 16);
  const auto boundary_text = doc.get_string("model.boundary", "open");
  require(doc, "model.boundary", boundary_text == "open" || boundary_text == "periodic",
          "expected open or periodic, got '" + boundary_text + "'");
  const auto boundary = boundary_text == "open" ? Boundary::open : Boundary::periodic;
  const double eps = doc.get_double("model.epsilon", 1.0);
  require(doc, "model.epsilon", eps >= 0.0 && std::isfinite(eps), "must be >= 0");
  const auto phi = doc.get_list("model.potential", std::vector<double>{1.0, 0.4});
  ModelConfig cfg;
  try {
    cfg = lattice_model(d, phi, eps, boundary);
    if (doc.has("model.kinetic_file")) {
      cfg.kinetic = read_matrix_file(doc, "model.kinetic_file", d);
      cfg.validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw doc.error("model", e.what());
  }
  if (doc.has("model.dim_cap")) cfg.dim_cap = static_cast<std::size_t>(read_count(doc, "model.dim_cap", 0, 1, 1 << 20));
  return cfg;
}

inline ExperimentParams read_params(const IniDocument& doc, const std::string& name, const ModelConfig& model) {
  if (name == "cumulant-check") {
    CumulantCheckParams p;
    p.n_max = read_count(doc, "run.n_max", p.n_max, 1, 4);
    p.times = read_times(doc, "run.times", p.times);
    p.order_times = doc.get_list("run.order_times", p.order_times);
    for (std::size_t i = 0; i < p.order_times.size(); ++i)
      require(doc, "run.order_times", p.order_times[i] > 0.0 && (i == 0 || p.order_times[i] < p.order_times[i - 1]),
              "must be positive and strictly decreasing");
    require(doc, "run.order_times", p.order_times.size() >= 2, "need at least two times");
    p.inversion_tol = read_positive(doc, "tolerance.inversion", p.inversion_tol);
    p.slope_tol = read_positive(doc, "tolerance.slope", p.slope_tol);
    return p;
  }
  if (name == "bbgky-demo") {
    BbgkyDemoParams p;
    p.particles = read_count(doc, "run.particles", p.particles, 1, 6);
    p.times = read_times(doc, "run.times", p.times);
    p.exactness_tol = read_positive(doc, "tolerance.exactness", p.exactness_tol);
    return p;
  }
  if (name == "duality-check") {
    DualityCheckParams p;
    p.particles = read_count(doc, "run.particles", p.particles, 1, 4);
    p.times = read_times(doc, "run.times", p.times);
    p.samples = read_count(doc, "run.samples", p.samples, 1, 10000);
    p.pairing_tol = read_positive(doc, "tolerance.pairing", p.pairing_tol);
    return p;
  }
  if (name == "gke-check") {
    GkeCheckParams p;
    p.trace = read_positive(doc, "run.trace", p.trace);
    p.times = read_times(doc, "run.times", p.times);
    p.truncation = read_count(doc, "run.truncation", p.truncation, 0, 1);
    p.reference_order = read_count(doc, "run.reference_order", p.reference_order, 0, 6);
    p.equivalence_tol = read_positive(doc, "tolerance.equivalence", p.equivalence_tol);
    p.trace_tol = read_positive(doc, "tolerance.trace", p.trace_tol);
    require(doc, "run.reference_order",
            ipow(static_cast<std::size_t>(model.d), 2 + p.reference_order) <= model.dim_cap,
            "d^(2 + reference_order) exceeds the dimension cap");
    return p;
  }
  if (name == "meanfield-sweep") {
    MeanfieldSweepParams p;
    p.particles = read_integers(doc, "run.particles", p.particles, 1, 12);
    p.levels = read_integers(doc, "run.levels", p.levels, 1, 4);
    p.horizon = read_positive(doc, "run.horizon", p.horizon);
    p.correlation_epsilons = doc.get_list("run.correlation_epsilons", p.correlation_epsilons);
    for (std::size_t i = 0; i < p.correlation_epsilons.size(); ++i)
      require(doc, "run.correlation_epsilons",
              p.correlation_epsilons[i] > 0.0 && (i == 0 || p.correlation_epsilons[i] < p.correlation_epsilons[i - 1]),
              "must be positive and strictly decreasing");
    p.correlation_order = read_count(doc, "run.correlation_order", p.correlation_order, 0, 4);
    p.slope_tol = read_positive(doc, "tolerance.slope", p.slope_tol);
    const auto max_level = *std::max_element(p.levels.begin(), p.levels.end());
    for (double n : p.particles)
      require(doc, "run.particles", n >= max_level, "every N must be at least the largest level");
    require(doc, "run.particles", p.particles.size() >= 2, "need at least two particle numbers for a slope");
    return p;
  }
  if (name == "hartree") {
    HartreeParams p;
    p.points = read_count(doc, "run.points", p.points, 2, 1 << 16);
    require(doc, "run.points", (p.points & (p.points - 1)) == 0, "must be a power of two");
    p.length = read_positive(doc, "run.length", p.length);
    p.kernel = doc.get_string("run.kernel", p.kernel);
    require(doc, "run.kernel", p.kernel == "gaussian" || p.kernel == "contact" || p.kernel == "none",
            "expected gaussian, contact or none");
    p.strength = doc.get_double("run.strength", p.strength);
    p.alpha = read_positive(doc, "run.alpha", p.alpha);
    p.initial = doc.get_string("run.initial", p.initial);
    require(doc, "run.initial", p.initial == "bump" || p.initial == "plane", "expected bump or plane");
    p.mode = static_cast<int>(doc.get_int("run.mode", p.mode));
    p.dt = read_positive(doc, "run.dt", p.dt);
    p.horizon = read_positive(doc, "run.horizon", p.horizon);
    p.samples = read_count(doc, "run.samples", p.samples, 1, 100000);
    p.vlasov_check = doc.get_bool("run.vlasov_check", p.vlasov_check);
    require(doc, "run.vlasov_check", !p.vlasov_check || p.points <= 32, "the Vlasov comparison needs points <= 32");
    p.mass_tol = read_positive(doc, "tolerance.mass", p.mass_tol);
    p.energy_tol = read_positive(doc, "tolerance.energy", p.energy_tol);
    p.vlasov_tol = read_positive(doc, "tolerance.vlasov", p.vlasov_tol);
    return p;
  }
  throw doc.error("experiment.name", "unknown experiment '" + name + "'");
}

}  // namespace detail

/// Validates everything up front; throws ConfigError with the offending line.
inline ExperimentConfig parse_config(const IniDocument& doc) {
  ExperimentConfig cfg;
  cfg.name = doc.get_string("experiment.name");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.name) == names.end())
    throw doc.error("experiment.name", "unknown experiment '" + cfg.name + "'");
  const long seed = doc.get_int("experiment.seed", 1);
  detail::require(doc, "experiment.seed", seed >= 0, "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  if (cfg.name != "hartree") cfg.model = detail::read_model(doc);
  cfg.params = detail::read_params(doc, cfg.name, cfg.model);
  cfg.output_dir = doc.get_string("output.dir", "results");
  cfg.output_stem = doc.get_string("output.stem", cfg.name);
  detail::require(doc, "output.stem",
                  !cfg.output_stem.empty() && cfg.output_stem.find('/') == std::string::npos,
                  "must be a plain file name");
  doc.reject_unused();
  cfg.config_hash = sha256_hex(doc.text());
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(IniDocument::load(path)); }

/// A row that broke its tolerance.
struct CheckFailure {
  std::size_t row;  // index into the table
  std::string message;
};

struct ExperimentOutcome {
  ResultTable table;
  std::vector<CheckFailure> failures;
};

inline OperatorSequence random_observables(Rng& rng, int d, int s_max) {
  OperatorSequence g;
  g.items.push_back(ManyBodyOperator::scalar(d, 0.7));
  for (int s = 1; s <= s_max; ++s) g.items.push_back(random_symmetric_hermitian(rng, d, s));
  return g;
}

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

inline ExperimentOutcome run(const ExperimentConfig& cfg, const CumulantCheckParams& p) {
  ExperimentOutcome out{ResultTable({{"check", ColumnType::text},
                                     {"n", ColumnType::integer},
                                     {"t", ColumnType::real},
                                     {"residual", ColumnType::real}}),
                        {}};
  const Dynamics dyn(cfg.model);
  Rng rng(cfg.seed);
  std::vector<ManyBodyOperator> states, observables;
  for (int n = 1; n <= p.n_max; ++n) {
    states.push_back(random_density(rng, cfg.model.d, n));
    observables.push_back(random_hermitian(rng, cfg.model.d, n));
  }

  struct Point {
    int n;
    double t;
  };
  std::vector<Point> cells;
  for (int n = 1; n <= p.n_max; ++n)
    for (double t : p.times) cells.push_back({n, t});
  const auto inversion = parallel_map(cells.size(), [&](std::size_t i) {
    const auto& f = states[static_cast<std::size_t>(cells[i].n - 1)];
    const BlockGroup group(dyn, GroupKind::von_neumann, cells[i].t);
    return max_abs(cumulant_product_sum(group, f).matrix - dyn.propagator(cells[i].n).evolve_state(f, cells[i].t).matrix);
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.table.add_row({std::string("inversion"), std::int64_t{cells[i].n}, cells[i].t, inversion[i]});
    if (!(inversion[i] <= p.inversion_tol))
      out.failures.push_back({out.table.rows.size() - 1, "inversion residual " + fmt(inversion[i]) + " exceeds " +
                                                             fmt(p.inversion_tol)});
  }

  for (int n = 1; n <= p.n_max; ++n) {
    const auto rows = generator_order_check(n, dyn, p.order_times, observables[static_cast<std::size_t>(n - 1)]);
    const std::size_t first = out.table.rows.size();
    std::vector<double> ts, rs;
    for (const auto& r : rows) {
      out.table.add_row({std::string("generator"), std::int64_t{n}, r.t, r.residual});
      ts.push_back(r.t);
      rs.push_back(r.residual);
    }
    // n = 1: O(t); n >= 2: the residual (already divided by t for n > 2) tends to zero
    if (n == 1) {
      const auto fit = fit_loglog(ts, rs);
      if (std::abs(fit.slope - 1.0) > p.slope_tol)
        out.failures.push_back({first, "n = 1 residual slope " + fmt(fit.slope) + " is not 1 +- " + fmt(p.slope_tol)});
    } else {
      for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rs[i] < rs[i - 1]))
          out.failures.push_back({first + i, "n = " + std::to_string(n) + " residual does not decrease with t"});
    }
  }
  return out;
}

inline ExperimentOutcome run(const ExperimentConfig& cfg, const BbgkyDemoParams& p) {
  ExperimentOutcome out{ResultTable({{"t", ColumnType::real},
                                     {"s", ColumnType::integer},
                                     {"trace", ColumnType::real},
                                     {"series_vs_direct", ColumnType::real},
                                     {"last_term_norm", ColumnType::real}}),
                        {}};
  const Dynamics dyn(cfg.model);
  Rng rng(cfg.seed);
  const int n = p.particles;
  const auto density = random_symmetric_density(rng, cfg.model.d, n);
  const auto f0 = marginals_from_sector(density, n);
  for (double t : p.times) {
    const auto exact = evolved_sector_marginals(density, t, n, dyn);
    for (int s = 1; s <= n; ++s) {
      const auto r = bbgky_series(t, s, f0, n - s, dyn);
      const double dev = trace_norm(r.value.matrix - exact.F[static_cast<std::size_t>(s)].matrix);
      out.table.add_row({t, std::int64_t{s}, r.value.trace().real(), dev, r.last_term_norm});
      if (!(dev <= p.exactness_tol))
        out.failures.push_back({out.table.rows.size() - 1, "series differs from direct evolution by " + fmt(dev)});
    }
  }
  return out;
}

inline ExperimentOutcome run(const ExperimentConfig& cfg, const DualityCheckParams& p) {
  ExperimentOutcome out{ResultTable({{"sample", ColumnType::integer},
                                     {"t", ColumnType::real},
                                     {"observable_side", ColumnType::real},
                                     {"state_side", ColumnType::real},
                                     {"mismatch", ColumnType::real}}),
                        {}};
  const Dynamics dyn(cfg.model);
  const int n = p.particles;
  struct Row {
    double lhs, rhs;
  };
  const auto results = parallel_map(static_cast<std::size_t>(p.samples), [&](std::size_t k) {
    Rng rng(cfg.seed + k);
    const auto density = random_symmetric_density(rng, cfg.model.d, n);
    const auto f0 = marginals_from_sector(density, n);
    const auto g0 = random_observables(rng, cfg.model.d, n);
    std::vector<Row> rows;
    for (double t : p.times) {
      const double lhs = pairing(dual_solution(t, g0, dyn), f0);
      MarginalSequence ft = f0;
      for (int s = 1; s <= n; ++s) ft.F[static_cast<std::size_t>(s)] = bbgky_series(t, s, f0, n - s, dyn).value;
      rows.push_back({lhs, pairing(g0, ft)});
    }
    return rows;
  });
  for (std::size_t k = 0; k < results.size(); ++k)
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      const auto& r = results[k][i];
      const double mismatch = std::abs(r.lhs - r.rhs);
      out.table.add_row({static_cast<std::int64_t>(k), p.times[i], r.lhs, r.rhs, mismatch});
      if (!(mismatch <= p.pairing_tol))
        out.failures.push_back({out.table.rows.size() - 1, "pairing mismatch " + fmt(mismatch)});
    }
  return out;
}

inline ExperimentOutcome run(const ExperimentConfig& cfg, const GkeCheckParams& p) {
  ExperimentOutcome out{ResultTable({{"t", ColumnType::real},
                                     {"trace", ColumnType::real},
                                     {"trace_drift", ColumnType::real},
                                     {"min_eigenvalue", ColumnType::real},
                                     {"f2_vs_hierarchy", ColumnType::real}}),
                        {}};
  const Dynamics dyn(cfg.model);
  Rng rng(cfg.seed);
  auto f1 = random_density(rng, cfg.model.d, 1);
  f1.matrix *= p.trace;
  const auto traj = gke_integrate(f1, p.times, p.truncation, dyn);
  const auto data = chaotic_marginals(f1, 2 + p.reference_order);
  const auto dev = parallel_map(p.times.size(), [&](std::size_t i) {
    const double t = p.times[i];
    const auto f2 = functional_Fs(t, 2, traj.states[i], p.truncation, dyn).value;
    return trace_norm(f2.matrix - bbgky_series(t, 2, data, p.reference_order, dyn).value.matrix);
  });
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    const auto& f = traj.states[i];
    const double drift = std::abs(f.trace() - f1.trace());
    out.table.add_row({p.times[i], f.trace().real(), drift, min_eigenvalue(f.matrix), dev[i]});
    if (!(dev[i] <= p.equivalence_tol))
      out.failures.push_back({out.table.rows.size() - 1, "F_2 functional differs from the hierarchy by " + fmt(dev[i])});
    if (!(drift <= p.trace_tol))
      out.failures.push_back({out.table.rows.size() - 1, "trace drift " + fmt(drift)});
  }
  return out;
}

inline ExperimentOutcome run(const ExperimentConfig& cfg, const MeanfieldSweepParams& p) {
  ExperimentOutcome out{ResultTable({{"kind", ColumnType::text},
                                     {"s", ColumnType::integer},
                                     {"particles", ColumnType::integer},
                                     {"epsilon", ColumnType::real},
                                     {"value", ColumnType::real}}),
                        {}};
  Rng rng(cfg.seed);
  const auto rho = random_density(rng, cfg.model.d, 1);
  struct Point {
    int s, n;
  };
  std::vector<Point> cells;
  for (double s : p.levels)
    for (double n : p.particles) cells.push_back({static_cast<int>(s), static_cast<int>(n)});
  const auto points = parallel_map(cells.size(), [&](std::size_t i) {
    return chaos_residual(cells[i].n, cells[i].s, {p.horizon}, product_sector(rho), cfg.model)[0];
  });
  std::size_t k = 0;
  for (double sd : p.levels) {
    const auto s = static_cast<std::int64_t>(sd);
    std::vector<double> eps, res;
    for (std::size_t j = 0; j < p.particles.size(); ++j, ++k) {
      out.table.add_row({std::string("chaos"), s, std::int64_t{points[k].particles}, points[k].epsilon,
                         points[k].residual});
      eps.push_back(points[k].epsilon);
      res.push_back(points[k].residual);
    }
    const auto fit = fit_loglog(eps, res);
    out.table.add_row({std::string("chaos_slope"), s, std::int64_t{0}, 0.0, fit.slope});
    if (std::abs(fit.slope - 1.0) > p.slope_tol)
      out.failures.push_back({out.table.rows.size() - 1, "chaos residual slope " + fmt(fit.slope) + " is not 1 +- " +
                                                             fmt(p.slope_tol)});
  }

  const int s_corr = 2;
  if (!p.correlation_epsilons.empty()) {
    const auto rows = correlation_vanishing(p.correlation_epsilons, s_corr, p.horizon, rho, p.correlation_order, cfg.model);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.table.add_row({std::string("correlation"), std::int64_t{s_corr}, std::int64_t{0}, rows[i].epsilon, rows[i].norm});
      if (i > 0 && !(rows[i].norm < rows[i - 1].norm))
        out.failures.push_back({out.table.rows.size() - 1, "correlation norm does not decrease with epsilon"});
    }
  }
  return out;
}

inline GridState hartree_initial(const HartreeParams& p) {
  if (p.initial == "plane") return plane_wave(p.points, p.length, p.mode);
  Eigen::VectorXcd v(p.points);
  for (int j = 0; j < p.points; ++j) {
    const double x = 2 * std::numbers::pi * j / p.points;
    v(j) = std::exp(std::cos(x)) * std::polar(1.0, std::sin(2 * x));
  }
  return {p.length, v};
}

inline PotentialKernel hartree_kernel(const HartreeParams& p) {
  if (p.kernel == "contact") return PotentialKernel::contact(p.strength);
  if (p.kernel == "none") return PotentialKernel::none();
  const double a = p.strength;
  const double alpha = p.alpha;
  return PotentialKernel::sampled(p.points, p.length, [a, alpha](double r) { return a * std::exp(-alpha * r * r); });
}

inline ExperimentOutcome run(const ExperimentConfig&, const HartreeParams& p) {
  std::vector<Column> cols{{"t", ColumnType::real},
                           {"mass", ColumnType::real},
                           {"energy", ColumnType::real},
                           {"mass_drift", ColumnType::real},
                           {"energy_drift", ColumnType::real}};
  if (p.vlasov_check) cols.push_back({"vlasov_distance", ColumnType::real});
  ExperimentOutcome out{ResultTable(cols), {}};

  const auto psi0 = hartree_initial(p);
  const auto kernel = hartree_kernel(p);
  HartreeOptions opt;
  opt.dt = p.dt;
  for (int k = 1; k <= p.samples; ++k) opt.outputs.push_back(p.horizon * k / p.samples);
  const auto traj = hartree_split_step(psi0, p.horizon, kernel, opt);
  const HartreeSolver solver(p.points, p.length, kernel);
  const double m0 = psi0.mass();
  const double e0 = solver.energy(psi0.psi);

  std::vector<ManyBodyOperator> vlasov;
  if (p.vlasov_check) {
    const Eigen::VectorXcd u0 = psi0.lattice_vector();
    rk4::Options ro;
    ro.tol = 1e-12;
    vlasov = vlasov_solve({p.points, 1, u0 * u0.adjoint(), true}, opt.outputs, grid_model(p.points, p.length, kernel), ro)
                 .states;
  }
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& g = traj.states[i];
    const double mass = g.mass();
    const double energy = solver.energy(g.psi);
    std::vector<Cell> row{traj.times[i], mass, energy, std::abs(mass - m0), std::abs(energy - e0)};
    const std::size_t at = out.table.rows.size();
    if (p.vlasov_check) {
      const Eigen::VectorXcd u = g.lattice_vector();
      const double dist = trace_norm(Matrix(u * u.adjoint()) - vlasov[i].matrix);
      row.emplace_back(dist);
      if (!(dist <= p.vlasov_tol)) out.failures.push_back({at, "Hartree and Vlasov differ by " + fmt(dist)});
    }
    out.table.add_row(std::move(row));
    if (!(std::abs(mass - m0) <= p.mass_tol)) out.failures.push_back({at, "mass drift " + fmt(std::abs(mass - m0))});
    if (!(std::abs(energy - e0) <= p.energy_tol))
      out.failures.push_back({at, "energy drift " + fmt(std::abs(energy - e0))});
  }
  return out;
}

}  // namespace detail

inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  return std::visit([&](const auto& p) { return detail::run(cfg, p); }, cfg.params);
}

}  // namespace bbgky::harness
