#include <catch2/catch_amalgamated.hpp>

#include "bbgky/hierarchies.hpp"
#include "bbgky/random.hpp"

using namespace bbgky;

namespace {

OperatorSequence random_observables(Rng& rng, int d, int s_max) {
  OperatorSequence g;
  g.items.push_back(ManyBodyOperator::scalar(d, 0.7));
  for (int s = 1; s <= s_max; ++s) g.items.push_back(random_symmetric_hermitian(rng, d, s));
  return g;
}

ManyBodyOperator free_product_flow(const Dynamics& dyn, const ManyBodyOperator& f, double t) {
  const Matrix w = dyn.free_unitary(f.s, t);
  return {f.d, f.s, w * f.matrix * w.adjoint(), true};
}

}  // namespace

TEST_CASE("marginals_from_sector", "[hierarchies]") {
  Rng rng(31);
  SECTION("N = 1") {
    const auto d1 = random_density(rng, 3, 1);
    const auto m = marginals_from_sector(d1, 2);
    CHECK(max_abs(m.F[1].matrix - d1.matrix) < 1e-15);
    CHECK(std::abs(m.F[1].trace() - 1.0) < 1e-14);
    CHECK(max_abs(m.F[2].matrix) == 0.0);
  }
  SECTION("N = 2 product state") {
    const auto rho = random_density(rng, 2, 1);
    const auto m = marginals_from_sector(tensor(rho, rho), 2);
    CHECK(max_abs(m.F[1].matrix - 2.0 * rho.matrix) < 1e-14);
    CHECK(max_abs(m.F[2].matrix - 2.0 * kron(rho.matrix, rho.matrix)) < 1e-14);
    CHECK(std::abs(m.F[0].trace() - 1.0) < 1e-14);
  }
  SECTION("N = 3 random symmetric state") {
    const auto m = marginals_from_sector(random_symmetric_density(rng, 2, 3), 3);
    CHECK(std::abs(m.F[1].trace() - 3.0) < 1e-12);
    CHECK(std::abs(m.F[2].trace() - 6.0) < 1e-12);
    CHECK(is_permutation_symmetric(m.F[2]));
  }
  SECTION("rejected inputs") {
    auto not_symmetric = tensor(random_density(rng, 2, 1), random_density(rng, 2, 1));
    CHECK_THROWS_AS(marginals_from_sector(not_symmetric, 2), PreconditionError);
    auto negative = random_symmetric_density(rng, 2, 2);
    negative.matrix = 2.0 * Matrix::Identity(4, 4) / 4.0 - negative.matrix;
    negative.matrix(0, 0) -= 1.0;
    negative.matrix(3, 3) += 1.0;
    CHECK_THROWS_AS(marginals_from_sector(negative, 2), PreconditionError);
  }
}

TEST_CASE("bbgky_series special cases", "[hierarchies]") {
  Rng rng(32);
  const auto density = random_symmetric_density(rng, 2, 3);
  const auto f0 = marginals_from_sector(density, 3);
  OracleOptions opt;
  opt.rk4.tol = 1e-11;

  SECTION("eps = 0 is the free product flow") {
    const Dynamics dyn(default_two_site_model(0.0));
    for (int s = 1; s <= 3; ++s) {
      const auto r = bbgky_series(0.8, s, f0, 3 - s, dyn);
      CHECK(trace_norm(r.value.matrix - free_product_flow(dyn, f0.F[static_cast<std::size_t>(s)], 0.8).matrix) < 1e-12);
    }
  }
  SECTION("t = 0 returns the initial marginal") {
    const Dynamics dyn(default_two_site_model(1.0));
    for (int s = 1; s <= 3; ++s)
      CHECK(trace_norm(bbgky_series(0.0, s, f0, 3 - s, dyn).value.matrix - f0.F[static_cast<std::size_t>(s)].matrix) <
            1e-12);
  }
  SECTION("N = 3, s = 1, t = 0.4 against the evolved state") {
    const Dynamics dyn(default_two_site_model(1.0));
    const auto exact = evolved_sector_marginals(density, 0.4, 3, dyn);
    CHECK(trace_norm(bbgky_series(0.4, 1, f0, 2, dyn).value.matrix - exact.F[1].matrix) < 1e-8);
  }
  SECTION("insufficient truncation of a finite sector is refused") {
    const Dynamics dyn(default_two_site_model(1.0));
    CHECK_THROWS_AS(bbgky_series(0.4, 1, f0, 1, dyn), PreconditionError);
  }
}

TEST_CASE("bbgky_series is exact on finite sectors", "[hierarchies][property]") {
  Rng rng(33);
  for (int d : {2, 3})
    for (int n = 1; n <= (d == 2 ? 4 : 3); ++n)
      for (double eps : {0.0, 0.3, 1.0}) {
        const Dynamics dyn(lattice_model(d, std::vector<double>{1.0, 0.5}, eps, Boundary::periodic));
        const auto density = random_symmetric_density(rng, d, n);
        const auto f0 = marginals_from_sector(density, n);
        const double t = 1.0;
        const auto exact = evolved_sector_marginals(density, t, n, dyn);
        for (int s = 1; s <= n; ++s) {
          const auto r = bbgky_series(t, s, f0, n - s, dyn);
          CHECK(trace_norm(r.value.matrix - exact.F[static_cast<std::size_t>(s)].matrix) <= 1e-8);
          CHECK(is_permutation_symmetric(r.value, 1e-9));
          CHECK(min_eigenvalue(r.value.matrix) >= -1e-9);
          if (s == 1) CHECK(std::abs(r.value.trace() - static_cast<double>(n)) < 1e-9);
        }
      }
}

TEST_CASE("bbgky_iteration", "[hierarchies]") {
  Rng rng(34);
  const auto density = random_symmetric_density(rng, 2, 3);
  const auto f0 = marginals_from_sector(density, 3);

  SECTION("order 0 is the interacting flow of F_s(0)") {
    const Dynamics dyn(default_two_site_model(0.7));
    const auto r = bbgky_iteration(0.5, 2, f0, 0, dyn);
    CHECK(max_abs(r.value.matrix - dyn.propagator(2).evolve_state(f0.F[2], 0.5).matrix) < 1e-13);
  }
  SECTION("eps = 0 keeps only the order-0 term") {
    const Dynamics dyn(default_two_site_model(0.0));
    const auto r0 = bbgky_iteration(0.5, 1, f0, 0, dyn);
    const auto r2 = bbgky_iteration(0.5, 1, f0, 2, dyn);
    CHECK(max_abs(r0.value.matrix - r2.value.matrix) < 1e-14);
  }
  SECTION("agrees with the cumulant series at weak coupling") {
    const Dynamics dyn(default_two_site_model(0.2));
    const auto series = bbgky_series(0.5, 1, f0, 2, dyn);
    const auto iter = bbgky_iteration(0.5, 1, f0, 2, dyn);
    CHECK(trace_norm(series.value.matrix - iter.value.matrix) <= 1e-4);
  }
  SECTION("finite sector: order N - s is exact") {
    const Dynamics dyn(default_two_site_model(1.0));
    const auto series = bbgky_series(0.5, 1, f0, 2, dyn);
    const auto iter = bbgky_iteration(0.5, 1, f0, 2, dyn);
    CHECK(trace_norm(series.value.matrix - iter.value.matrix) <= 1e-8);
  }
}

TEST_CASE("dual_series", "[hierarchies]") {
  const Dynamics dyn(default_two_site_model(1.0));
  Rng rng(35);
  const auto g0 = random_observables(rng, 2, 3);
  const double t = 0.6;

  CHECK(max_abs(dual_series(t, 1, g0, dyn).matrix - dyn.propagator(1).evolve_observable(g0.items[1], t).matrix) <
        1e-13);

  const auto g2 = dual_series(t, 2, g0, dyn);
  const int l1[] = {1};
  const int l2[] = {2};
  const auto g1sum = tensor_embed(g0.items[1], l1, 2) + tensor_embed(g0.items[1], l2, 2);
  const Matrix expected = dyn.propagator(2).evolve_observable(g0.items[2], t).matrix +
                          cumulant_forward(t, singles(1, 2), g1sum, dyn).matrix;
  CHECK(max_abs(g2.matrix - expected) < 1e-12);

  for (int s = 0; s <= 3; ++s)
    CHECK(max_abs(dual_series(0.0, s, g0, dyn).matrix - g0.items[static_cast<std::size_t>(s)].matrix) < 1e-12);

  CHECK_THROWS_AS(dual_series(t, 4, g0, dyn), PreconditionError);
  CHECK(is_permutation_symmetric(dual_series(t, 3, g0, dyn), 1e-9));
}

TEST_CASE("pairing", "[hierarchies]") {
  Rng rng(36);
  const auto f = marginals_from_sector(random_symmetric_density(rng, 2, 3), 3);
  OperatorSequence number;
  number.items = {ManyBodyOperator::zero(2, 0), ManyBodyOperator::identity(2, 1), ManyBodyOperator::zero(2, 2),
                  ManyBodyOperator::zero(2, 3)};
  CHECK(pairing(number, f) == Catch::Approx(3.0).epsilon(1e-13));

  OperatorSequence zero;
  for (int s = 0; s <= 3; ++s) zero.items.push_back(ManyBodyOperator::zero(2, s));
  CHECK(pairing(zero, f) == 0.0);
}

TEST_CASE("duality of the two solution paths", "[hierarchies][property]") {
  Rng rng(37);
  for (double eps : {0.3, 1.0}) {
    const Dynamics dyn(default_two_site_model(eps));
    const auto density = random_symmetric_density(rng, 2, 3);
    const auto f0 = marginals_from_sector(density, 3);
    const auto g0 = random_observables(rng, 2, 3);
    for (double t : {0.25, 0.5, 1.0}) {
      const double lhs = pairing(dual_solution(t, g0, dyn), f0);
      MarginalSequence ft = f0;
      for (int s = 1; s <= 3; ++s) ft.F[static_cast<std::size_t>(s)] = bbgky_series(t, s, f0, 3 - s, dyn).value;
      CHECK(std::abs(lhs - pairing(g0, ft)) <= 1e-8);
    }
  }
}

TEST_CASE("correlation_series", "[hierarchies]") {
  Rng rng(38);
  const auto f1 = 0.5 * random_density(rng, 2, 1);
  CHECK(max_abs(correlation_series(0.5, 2, f1, 1, Dynamics(default_two_site_model(0.0))).value.matrix) < 1e-13);
  CHECK(max_abs(correlation_series(0.0, 2, f1, 0, Dynamics(default_two_site_model(1.0))).value.matrix) < 1e-13);

  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.5, 0.25}) {
    const auto g2 = correlation_series(0.5, 2, f1, 1, Dynamics(default_two_site_model(eps))).value;
    const double v = eps * eps * trace_norm(g2);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("cluster_assemble", "[hierarchies]") {
  Rng rng(39);
  const auto f1 = random_density(rng, 2, 1);
  CHECK(max_abs(cluster_assemble(f1, {}, 3).matrix - tensor_power(f1, 3).matrix) < 1e-15);

  const auto g2 = 0.1 * random_symmetric_hermitian(rng, 2, 2);
  CHECK(max_abs(cluster_assemble(f1, {{2, g2}}, 2).matrix - (kron(f1.matrix, f1.matrix) + g2.matrix)) < 1e-15);

  const auto g3 = 0.05 * random_symmetric_hermitian(rng, 2, 3);
  CHECK(is_permutation_symmetric(cluster_assemble(f1, {{2, g2}, {3, g3}}, 3)));
}

TEST_CASE("hierarchy ODE oracles", "[hierarchies]") {
  Rng rng(40);
  const auto density = random_symmetric_density(rng, 2, 3);
  const auto f0 = marginals_from_sector(density, 3);
  OracleOptions opt;
  opt.rk4.tol = 1e-11;

  SECTION("eps = 0 is the free von Neumann flow per component") {
    const Dynamics dyn(default_two_site_model(0.0));
    const auto out = hierarchy_ode_oracle(f0, {0.5}, dyn, opt);
    for (int s = 1; s <= 3; ++s)
      CHECK(max_abs(out[0].F[static_cast<std::size_t>(s)].matrix -
                    free_product_flow(dyn, f0.F[static_cast<std::size_t>(s)], 0.5).matrix) < 1e-7);
  }
  SECTION("agrees with the cumulant series") {
    const Dynamics dyn(default_two_site_model(1.0));
    const auto out = hierarchy_ode_oracle(f0, {0.5}, dyn, opt);
    for (int s = 1; s <= 3; ++s)
      CHECK(trace_norm(out[0].F[static_cast<std::size_t>(s)].matrix - bbgky_series(0.5, s, f0, 3 - s, dyn).value.matrix) <
            1e-6);
  }
  SECTION("dual integrator agrees with the dual series") {
    const Dynamics dyn(default_two_site_model(1.0));
    const auto g0 = random_observables(rng, 2, 3);
    const auto out = dual_ode_oracle(g0, {0.5}, dyn, opt);
    for (int s = 1; s <= 3; ++s)
      CHECK(trace_norm(out[0].items[static_cast<std::size_t>(s)].matrix - dual_series(0.5, s, g0, dyn).matrix) < 1e-6);
  }
  SECTION("grand-canonical data is refused") {
    const Dynamics dyn(default_two_site_model(1.0));
    CHECK_THROWS_AS(hierarchy_ode_oracle(chaotic_marginals(random_density(rng, 2, 1), 3), {0.5}, dyn),
                    PreconditionError);
  }
}

TEST_CASE("operator sequence norms", "[hierarchies]") {
  OperatorSequence seq;
  seq.items = {ManyBodyOperator::scalar(2, 1.0), ManyBodyOperator::identity(2, 1), 3.0 * ManyBodyOperator::identity(2, 2)};
  seq.weight = 0.5;
  // max(1, 0.5 * 1, 0.25 / 2 * 3)
  CHECK(seq.gamma_norm() == Catch::Approx(1.0));
  seq.weight = 3.0;
  // 1 + 3 * 2 + 9 * 12
  CHECK(seq.alpha_norm() == Catch::Approx(115.0));
}
