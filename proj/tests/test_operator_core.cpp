#include <catch2/catch_amalgamated.hpp>

#include "bbgky/model.hpp"
#include "bbgky/operator_core.hpp"
#include "bbgky/random.hpp"

using namespace bbgky;
using Catch::Matchers::WithinAbs;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("tensor_embed places the operator on the named factor", "[operator-core]") {
  Rng rng(1);
  const auto a = random_operator(rng, 2, 1);
  const Matrix id = Matrix::Identity(2, 2);

  const int one[] = {1};
  const int two[] = {2};
  CHECK(max_abs(tensor_embed(a, one, 2).matrix - kron(a.matrix, id)) < 1e-15);
  CHECK(max_abs(tensor_embed(a, two, 2).matrix - kron(id, a.matrix)) < 1e-15);

  SECTION("middle factor of three") {
    const int mid[] = {2};
    CHECK(max_abs(tensor_embed(a, mid, 3).matrix - kron(kron(id, a.matrix), id)) < 1e-15);
  }
  SECTION("two-particle operator with reversed labels is the swapped operator") {
    const auto b = random_operator(rng, 2, 2);
    const int rev[] = {2, 1};
    const int swap[] = {2, 1};
    CHECK(max_abs(tensor_embed(b, rev, 2).matrix - permute_particles(b.matrix, 2, swap)) < 1e-15);
  }
}

TEST_CASE("embedded swap-invariant pair potential is invariant under relabelling", "[operator-core]") {
  const auto cfg = lattice_model(3, std::vector<double>{1.0, 0.5, 0.2}, 1.0, Boundary::periodic);
  const ManyBodyOperator phi(3, 2, cfg.pair_potential, true);
  const int labels[] = {1, 3};
  const auto embedded = tensor_embed(phi, labels, 3);
  const int swap13[] = {3, 2, 1};
  CHECK(max_abs(permute_particles(embedded.matrix, 3, swap13) - embedded.matrix) < 1e-14);
}

TEST_CASE("tensor_embed rejects bad labels", "[operator-core]") {
  Rng rng(2);
  const auto a = random_operator(rng, 2, 2);
  const int out_of_range[] = {1, 4};
  const int dup[] = {2, 2};
  const int zero[] = {0, 1};
  CHECK_THROWS_AS(tensor_embed(a, out_of_range, 3), LabelError);
  CHECK_THROWS_AS(tensor_embed(a, dup, 3), LabelError);
  CHECK_THROWS_AS(tensor_embed(a, zero, 3), LabelError);
  const int too_few[] = {1};
  CHECK_THROWS_AS(tensor_embed(a, too_few, 3), LabelError);
}

TEST_CASE("partial_trace", "[operator-core]") {
  Rng rng(3);
  SECTION("product factorizes") {
    const auto a = random_operator(rng, 2, 1);
    const auto b = random_operator(rng, 2, 1);
    const int keep[] = {1};
    const auto r = partial_trace(tensor(a, b), keep);
    CHECK(r.s == 1);
    CHECK(max_abs(r.matrix - a.matrix * b.trace()) < 1e-14);
  }
  SECTION("empty keep set gives the scalar trace") {
    const auto rho = random_density(rng, 3, 2);
    const auto r = partial_trace(rho, std::span<const int>{});
    CHECK(r.s == 0);
    CHECK_THAT(r.matrix(0, 0).real(), WithinAbs(1.0, 1e-14));
    CHECK_THAT(r.matrix(0, 0).imag(), WithinAbs(0.0, 1e-14));
  }
  SECTION("maximally entangled pure state reduces to I/d") {
    for (int d : {2, 3, 4}) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
      for (int a = 0; a < d; ++a) v(a * d + a) = 1.0 / std::sqrt(static_cast<double>(d));
      const ManyBodyOperator psi(d, 2, v * v.adjoint(), true);
      const int keep[] = {2};
      const auto r = partial_trace(psi, keep);
      CHECK(max_abs(r.matrix - Matrix::Identity(d, d) / static_cast<double>(d)) < 1e-14);
    }
  }
  SECTION("trace, hermiticity and positivity are preserved") {
    for (int trial = 0; trial < 5; ++trial) {
      const auto rho = random_density(rng, 2, 3);
      const int keep[] = {1, 3};
      const auto r = partial_trace(rho, keep);
      CHECK_THAT(std::abs(r.trace() - rho.trace()), WithinAbs(0.0, 1e-13));
      CHECK(hermitian_defect(r.matrix) < 1e-14);
      CHECK(min_eigenvalue(r.matrix) > -1e-14);
    }
  }
  SECTION("out-of-range keep label") {
    const auto rho = random_density(rng, 2, 2);
    const int keep[] = {3};
    CHECK_THROWS_AS(partial_trace(rho, keep), LabelError);
  }
}

TEST_CASE("partial_trace undoes tensor_embed up to d^(s-|L|)", "[operator-core][property]") {
  Rng rng(4);
  for (int d = 1; d <= 3; ++d)
    for (int s_total = 1; s_total <= 3; ++s_total)
      for (int k = 1; k <= s_total; ++k)
        for (int trial = 0; trial < 3; ++trial) {
          std::vector<int> labels(static_cast<std::size_t>(s_total));
          std::iota(labels.begin(), labels.end(), 1);
          std::shuffle(labels.begin(), labels.end(), rng);
          labels.resize(static_cast<std::size_t>(k));
          std::vector<int> sorted = labels;
          std::sort(sorted.begin(), sorted.end());

          const auto op = random_operator(rng, d, k);
          const auto back = partial_trace(tensor_embed(op, labels, s_total), sorted);
          // kept particles come back in ascending label order: undo that relabelling
          std::vector<int> order(static_cast<std::size_t>(k));
          for (int p = 0; p < k; ++p)
            order[static_cast<std::size_t>(p)] = static_cast<int>(
                std::find(sorted.begin(), sorted.end(), labels[static_cast<std::size_t>(p)]) - sorted.begin() + 1);
          const Matrix expected = static_cast<double>(ipow(static_cast<std::size_t>(d), s_total - k)) * op.matrix;
          CHECK(max_abs(permute_particles(back.matrix, d, order) - expected) < 1e-12);
        }
}

TEST_CASE("norms and commutators", "[operator-core]") {
  CHECK_THAT(trace_norm(diag2(3, -4)), WithinAbs(7.0, 1e-14));
  CHECK_THAT(op_norm(diag2(3, -4)), WithinAbs(4.0, 1e-14));

  Rng rng(5);
  const auto a = random_operator(rng, 2, 2);
  CHECK(max_abs(commutator(a, a).matrix) == 0.0);

  const auto p = random_pure_state(rng, 5);
  CHECK_THAT(trace_norm(p), WithinAbs(1.0, 1e-13));

  SECTION("non-Hermitian trace norm uses singular values") {
    Matrix n = Matrix::Zero(2, 2);
    n(0, 1) = 2.0;
    CHECK_THAT(trace_norm(n), WithinAbs(2.0, 1e-14));
  }
  SECTION("commutator shape mismatch") {
    CHECK_THROWS_AS(commutator(random_operator(rng, 2, 1), random_operator(rng, 2, 2)), DimensionError);
  }
}

TEST_CASE("commutator trace-norm bound |[A,H]|_1 <= 2 |A|_1 |H|_op", "[operator-core][property]") {
  Rng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 2;
    const int s = 1 + trial % 3;
    const auto a = random_operator(rng, d, s);
    const auto h = random_hermitian(rng, d, s);
    CHECK(trace_norm(commutator(a, h)) <= 2.0 * trace_norm(a) * op_norm(h) * (1 + 1e-12));
  }
}

TEST_CASE("permutation symmetry checker", "[operator-core][property]") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int s = 2 + trial % 2;
    const auto sym = symmetrize(random_operator(rng, 2, s));
    CHECK(is_permutation_symmetric(sym));
    auto perturbed = sym;
    perturbed.matrix(0, 1) += 1e-6;
    CHECK_FALSE(is_permutation_symmetric(perturbed));
  }
}

TEST_CASE("ModelConfig validation", "[operator-core]") {
  auto cfg = default_two_site_model(0.5);
  CHECK_NOTHROW(cfg.validate());

  auto bad = cfg;
  bad.kinetic(0, 1) += cplx(0.0, 1e-6);
  CHECK_THROWS_AS(bad.validate(), PreconditionError);

  bad = cfg;
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);

  bad = cfg;
  bad.pair_potential(1, 1) = 3.0;  // (0,1) entry differs from (1,0)
  CHECK_THROWS_AS(bad.validate(), PreconditionError);

  bad = cfg;
  bad.pair_potential(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(bad.validate(), PreconditionError);

  cfg.dim_cap = 16;
  CHECK_NOTHROW(cfg.check_cap(4));
  CHECK_THROWS_AS(cfg.check_cap(5), CapExceeded);
}

TEST_CASE("lattice and spectral kinetic operators", "[operator-core]") {
  const Matrix k = lattice_kinetic(4, Boundary::periodic);
  CHECK(hermitian_defect(k) == 0.0);
  CHECK_THAT(k.rowwise().sum().cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-15));

  // plane waves are eigenvectors of the spectral operator with eigenvalue k^2/2
  const int n = 16;
  const double length = 2 * std::numbers::pi;
  const Matrix t = spectral_kinetic(n, length);
  for (int m : {0, 1, 3, -5}) {
    Eigen::VectorXcd v(n);
    for (int j = 0; j < n; ++j) v(j) = std::polar(1.0, m * length * j / n);
    CHECK(max_abs(t * v - 0.5 * m * m * v) < 1e-12);
  }
}
