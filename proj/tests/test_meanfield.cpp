#include <catch2/catch_amalgamated.hpp>

#include "bbgky/hartree.hpp"
#include "bbgky/meanfield.hpp"
#include "bbgky/random.hpp"

using namespace bbgky;

namespace {

ManyBodyOperator scaled_density(Rng& rng, int d, double trace) {
  auto rho = random_density(rng, d, 1);
  rho.matrix *= trace;
  return rho;
}

ManyBodyOperator free_flow(const ModelConfig& cfg, const ManyBodyOperator& f, double t) {
  const Dynamics dyn(cfg);
  const Matrix w = dyn.free_unitary(f.s, t);
  return {f.d, f.s, w * f.matrix * w.adjoint(), true};
}

ModelConfig without_interaction(ModelConfig cfg) {
  cfg.pair_potential.setZero();
  return cfg;
}

}  // namespace

TEST_CASE("vlasov_rhs", "[meanfield]") {
  Rng rng(51);
  const auto cfg = lattice_model(3, std::vector<double>{1.0, 0.4}, 1.0, Boundary::periodic);
  const auto f = scaled_density(rng, 3, 0.8);

  const auto free_cfg = without_interaction(cfg);
  CHECK(max_abs(vlasov_rhs(f, free_cfg).matrix - minus_i_commutator(cfg.kinetic, f.matrix)) < 1e-15);

  for (int trial = 0; trial < 5; ++trial) {
    const auto r = vlasov_rhs(scaled_density(rng, 3, 1.0), cfg);
    CHECK(std::abs(r.trace()) < 1e-14);
    CHECK(hermitian_defect(r.matrix) == 0.0);
  }

  SECTION("mean-field potential is the traced two-body commutator") {
    const Dynamics dyn(cfg.with_epsilon(1.0));
    const Matrix expected =
        minus_i_commutator(cfg.kinetic, f.matrix) + collision_term(dyn, 1, kron(f.matrix, f.matrix));
    CHECK(max_abs(vlasov_rhs(f, cfg).matrix - expected) < 1e-14);
  }
  SECTION("a state commuting with K and its own potential is stationary") {
    // uniform occupation on a ring: translation invariant, diagonal in momentum
    const ManyBodyOperator uniform(3, 1, Matrix::Identity(3, 3) / 3.0, true);
    CHECK(max_abs(vlasov_rhs(uniform, cfg).matrix) < 1e-15);
  }
}

TEST_CASE("vlasov_solve", "[meanfield]") {
  Rng rng(52);
  const auto cfg = default_two_site_model(1.0);
  const std::vector<double> times{0.5, 1.0};

  SECTION("no interaction is free flow") {
    const auto free_cfg = without_interaction(cfg);
    const auto f = scaled_density(rng, 2, 1.0);
    rk4::Options ro;
    ro.tol = 1e-12;
    const auto traj = vlasov_solve(f, times, free_cfg, ro);
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(max_abs(traj.states[i].matrix - free_flow(free_cfg, f, times[i]).matrix) < 1e-8);
  }
  SECTION("rank-one data stays pure and trace is conserved") {
    const auto pure = random_pure_state(rng, 2);
    const auto traj = vlasov_solve(pure, times, cfg);
    CHECK(traj.max_purity_drift <= 1e-7);
    CHECK(traj.max_trace_drift <= 1e-9);
  }
  SECTION("low-order iteration series") {
    const auto f = scaled_density(rng, 2, 0.2);
    const Dynamics dyn(cfg);
    const double t = 0.5;
    const auto traj = vlasov_solve(f, {t}, cfg);
    const auto first = vlasov_hierarchy_series(t, 1, f, 1, dyn);
    // one iteration leaves an error of second order in t * coupling
    const double coupling = op_norm(cfg.pair_potential) * trace_norm(f);
    CHECK(trace_norm(first.value.matrix - traj.states[0].matrix) <= (t * coupling) * (t * coupling));
  }
}

TEST_CASE("Vlasov hierarchy series", "[meanfield]") {
  Rng rng(53);
  const auto cfg = default_two_site_model(1.0);
  const Dynamics dyn(cfg);
  const auto f = scaled_density(rng, 2, 0.2);

  const Dynamics free(without_interaction(cfg));
  CHECK(max_abs(vlasov_hierarchy_series(0.7, 2, f, 2, free).value.matrix -
                free_flow(cfg, tensor_power(f, 2), 0.7).matrix) < 1e-12);
  CHECK(max_abs(vlasov_hierarchy_series(0.0, 2, f, 2, dyn).value.matrix - tensor_power(f, 2).matrix) < 1e-15);

  // chaos propagation: the hierarchy solution is the product of Vlasov solutions
  const auto traj = vlasov_solve(f, {0.5}, cfg);
  CHECK(trace_norm(vlasov_hierarchy_series(0.5, 2, f, 2, dyn).value.matrix - tensor_power(traj.states[0], 2).matrix) <=
        1e-4);
  CHECK_THROWS_AS(vlasov_hierarchy_series(0.5, 2, f, 4, dyn), PreconditionError);
}

TEST_CASE("chaos_residual", "[meanfield]") {
  Rng rng(54);
  const auto cfg = default_two_site_model(1.0);
  const auto rho = random_density(rng, 2, 1);

  const auto at_zero = chaos_residual(4, 1, {0.0}, product_sector(rho), cfg);
  CHECK(at_zero[0].residual < 1e-14);

  SECTION("without interaction only the combinatorial defect remains") {
    const auto pts = chaos_residual(4, 2, {0.0, 0.5, 1.0}, product_sector(rho), without_interaction(cfg));
    // eps^2 F_2(0) = (N-1)/N rho (x) rho
    CHECK(pts[0].residual == Catch::Approx(0.25).epsilon(1e-12));
    for (const auto& p : pts) CHECK(p.residual == Catch::Approx(0.25).epsilon(1e-7));
  }
  SECTION("direct evolution and the hierarchy integrator agree") {
    const auto a = chaos_residual(4, 2, {0.5, 1.0}, product_sector(rho), cfg, SectorSolver::direct);
    const auto b = chaos_residual(4, 2, {0.5, 1.0}, product_sector(rho), cfg, SectorSolver::hierarchy);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].residual - b[i].residual) < 1e-7);
  }
  SECTION("residual decreases with N at first order in eps") {
    for (int s : {1, 2}) {
      std::vector<double> eps, res;
      for (int n : {2, 4, 6, 8}) {
        const auto p = chaos_residual(n, s, {1.0}, product_sector(rho), cfg);
        if (!res.empty()) CHECK(p[0].residual < res.back());
        eps.push_back(p[0].epsilon);
        res.push_back(p[0].residual);
      }
      const auto fit = fit_loglog(eps, res);
      CHECK(std::abs(fit.slope - 1.0) <= 0.3);
      CHECK(fit.r2 >= 0.9);
    }
  }
  SECTION("site of largest occupation agrees with the Vlasov solution") {
    std::vector<double> ts;
    for (int k = 1; k <= 20; ++k) ts.push_back(0.05 * k);
    const auto traj = vlasov_solve(rho, ts, cfg);
    for (int n : {2, 4, 6, 8}) {
      const Dynamics dyn(cfg.with_epsilon(1.0 / n));
      const auto d = tensor_power(rho, n);
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const Matrix scaled = evolved_sector_marginals(d, ts[k], 1, dyn).F[1].matrix / static_cast<double>(n);
        CHECK(argmax_site(scaled) == argmax_site(traj.states[k].matrix));
      }
    }
  }
}

TEST_CASE("correlation_vanishing", "[meanfield]") {
  Rng rng(55);
  const auto cfg = default_two_site_model(1.0);
  const auto rho = random_density(rng, 2, 1);
  const auto rows = correlation_vanishing({0.5, 0.25, 0.125, 0.0}, 2, 1.0, rho, 3, cfg);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].norm < rows[i - 1].norm);
  CHECK(rows.back().norm == 0.0);

  for (const auto& r : correlation_vanishing({0.5, 0.25}, 2, 1.0, rho, 2, without_interaction(cfg)))
    CHECK(r.norm < 1e-13);
}

TEST_CASE("dual Vlasov hierarchy for additive observables", "[meanfield]") {
  Rng rng(56);
  const auto cfg = default_two_site_model(1.0);
  const Dynamics dyn(cfg);
  const auto g1 = random_hermitian(rng, 2, 1);

  CHECK(max_abs(dual_vlasov_additive(0.6, 1, g1, dyn).matrix - free_flow(cfg, g1, -0.6).matrix) < 1e-14);

  const Dynamics free(without_interaction(cfg));
  for (int s = 2; s <= 3; ++s) CHECK(max_abs(dual_vlasov_additive(0.6, s, g1, free).matrix) < 1e-15);

  SECTION("pairing identity") {
    const auto f = scaled_density(rng, 2, 0.2);
    for (double t : {0.5, 1.0}) {
      const auto traj = vlasov_solve(f, {t}, cfg);
      const double rhs = (g1.matrix.transpose().cwiseProduct(traj.states[0].matrix)).sum().real();
      CHECK(std::abs(dual_vlasov_pairing(t, 3, g1, f, dyn) - rhs) <= 1e-4);
    }
  }
  SECTION("s = 2 equals the single-integral formula") {
    const double t = 0.7;
    const int l1[] = {1};
    const int l2[] = {2};
    auto integrand = [&](double t1) -> Matrix {
      const auto a = free_flow(cfg, g1, -t1);
      const auto sum = tensor_embed(a, l1, 2) + tensor_embed(a, l2, 2);
      const auto inner = interaction_generator(sum, 1, 2, cfg);
      return free_flow(cfg, inner, -(t - t1)).matrix;
    };
    const Matrix expected = integrate_composite<Matrix>(integrand, 0.0, t, 8, Matrix::Zero(4, 4));
    CHECK(max_abs(dual_vlasov_additive(t, 2, g1, dyn).matrix - expected) < 1e-10);
  }
}

TEST_CASE("fit_loglog and ScalingSweep", "[meanfield]") {
  const auto fit = fit_loglog({1.0, 0.5, 0.25}, {3.0, 0.75, 0.1875});
  CHECK(fit.slope == Catch::Approx(2.0));
  CHECK(fit.r2 == Catch::Approx(1.0));
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), PreconditionError);

  ScalingSweep sweep{{0.5, 0.25, 0.125}, 2, 1.0};
  CHECK_NOTHROW(sweep.validate());
  sweep.epsilons = {0.5, 0.5};
  CHECK_THROWS_AS(sweep.validate(), PreconditionError);
}

TEST_CASE("Hartree split-step", "[meanfield][hartree]") {
  const double length = 2 * std::numbers::pi;

  SECTION("free plane wave picks up the kinetic phase") {
    const auto pw = plane_wave(32, length, 3);
    HartreeOptions opt;
    opt.dt = 0.01;
    const double t = 1.0;
    const auto traj = hartree_split_step(pw, t, PotentialKernel::none(), opt);
    const cplx phase = std::polar(1.0, -0.5 * 9.0 * t);
    CHECK((traj.states[0].psi - phase * pw.psi).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("cubic NLS plane wave rotates at k^2/2 + |A|^2") {
    const auto pw = plane_wave(32, length, 2);
    const double omega = 0.5 * 4.0 + 1.0 / length;
    const double period = 2 * std::numbers::pi / omega;
    HartreeOptions opt;
    opt.dt = 1e-3;
    const auto traj = hartree_split_step(pw, period, PotentialKernel::contact(1.0), opt);
    CHECK((traj.states[0].psi - pw.psi).cwiseAbs().maxCoeff() * std::sqrt(length) < 1e-10);
  }
  SECTION("mass and energy conservation, second order in dt") {
    const int n = 64;
    const auto kernel = PotentialKernel::sampled(n, length, [](double r) { return std::exp(-2 * r * r); });
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) {
      const double x = j * length / n;
      v(j) = std::exp(std::cos(x)) * std::polar(1.0, std::sin(2 * x));
    }
    const GridState psi0(length, v);
    HartreeOptions opt;
    opt.dt = 2e-4;
    const auto traj = hartree_split_step(psi0, 1.0, kernel, opt);
    CHECK(traj.max_mass_drift <= 1e-10);
    CHECK(traj.max_energy_drift <= 1e-8);

    opt.dt = 1e-5;
    const auto reference = hartree_split_step(psi0, 1.0, kernel, opt).states[0].psi;
    auto defect = [&](double dt) {
      HartreeOptions o;
      o.dt = dt;
      return (hartree_split_step(psi0, 1.0, kernel, o).states[0].psi - reference).norm();
    };
    CHECK(defect(4e-3) / defect(2e-3) == Catch::Approx(4.0).epsilon(0.05));
  }
  SECTION("agrees with the Vlasov equation on rank-one data") {
    const int n = 16;
    const auto kernel = PotentialKernel::sampled(n, length, [](double r) { return std::exp(-2 * r * r); });
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) {
      const double x = j * length / n;
      v(j) = std::exp(std::cos(x)) * std::polar(1.0, std::sin(2 * x));
    }
    const GridState psi0(length, v);
    HartreeOptions opt;
    opt.dt = 2e-4;
    const auto hartree = hartree_split_step(psi0, 1.0, kernel, opt);
    const Eigen::VectorXcd u0 = psi0.lattice_vector();
    rk4::Options ro;
    ro.tol = 1e-12;
    const auto vlasov = vlasov_solve({n, 1, u0 * u0.adjoint(), true}, {1.0}, grid_model(n, length, kernel), ro);
    const Eigen::VectorXcd u = hartree.states[0].lattice_vector();
    CHECK(trace_norm(Matrix(u * u.adjoint()) - vlasov.states[0].matrix) <= 1e-5);
  }
  SECTION("errors") {
    const auto pw = plane_wave(64, length, 1);
    HartreeOptions opt;
    opt.dt = 0.5;
    CHECK_THROWS_AS(hartree_split_step(pw, 1.0, PotentialKernel::none(), opt), PreconditionError);
    CHECK_THROWS_AS(GridState(length, Eigen::VectorXcd::Ones(12)), PreconditionError);
    opt.dt = 1e-3;
    CHECK_THROWS_AS(hartree_split_step(pw, 1.0, PotentialKernel::sampled(32, length, [](double) { return 1.0; }), opt),
                    DimensionError);
  }
}
