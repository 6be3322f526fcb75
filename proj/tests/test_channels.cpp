#include <doctest.h>

#include <random>

#include "scissorlab/channels.hpp"
#include "support.hpp"

using namespace scissorlab;
using scissorlab::testing::random_mixed;
using scissorlab::testing::random_state;
using scissorlab::testing::trace_distance;

namespace {
double mean_photons(const DensityOperator& rho, std::size_t mode) {
    double n = 0.0;
    for (std::size_t i = 0; i < rho.space().dim(); ++i)
        n += rho.space().digit(i, mode) * rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    return n;
}
}  // namespace

TEST_CASE("loss Kraus operators are complete") {
    for (double tau : {0.0, 0.3, 0.7, 1.0}) {
        auto ks = LossChannel(tau).kraus(8);
        Matrix sum = Matrix::Zero(9, 9);
        for (const auto& k : ks) sum += k.adjoint() * k;
        CHECK((sum - Matrix::Identity(9, 9)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(LossChannel(1.2), ParameterOutOfRange);
}

TEST_CASE("pure_loss examples") {
    std::mt19937_64 rng(1);
    auto s = FockSpace::uniform(2, 3);
    auto rho = random_mixed(s, rng);
    CHECK((pure_loss(rho, 1, 1.0).matrix() - rho.matrix()).norm() < 1e-15);

    auto dead = pure_loss(rho, 0, 0.0);
    auto vac0 = partial_trace(dead, {0});
    CHECK(std::abs(vac0.matrix()(0, 0) - 1.0) < 1e-12);

    auto one = pure_loss(fock_state(FockSpace::uniform(1, 1), {1}), 0, 0.7);
    CHECK(std::abs(one.matrix()(0, 0) - 0.3) < 1e-15);
    CHECK(std::abs(one.matrix()(1, 1) - 0.7) < 1e-15);
    CHECK(std::abs(one.matrix()(0, 1)) < 1e-15);
}

TEST_CASE("loss branches") {
    std::mt19937_64 rng(2);
    auto psi = random_state(FockSpace::uniform(2, 3), rng);
    auto same = loss_on_kraus_branches(psi, 0, 1.0);
    REQUIRE(same.branches.size() == 1);
    CHECK((same.branches[0].amplitudes() - psi.amplitudes()).norm() < 1e-15);

    auto epr = epr_state(0.3, 12);
    auto br = loss_on_kraus_branches(epr, 1, 0.1, 8);
    double total = 0.0;
    for (const auto& b : br.branches) total += b.norm_sq();
    CHECK(std::abs(total + br.residual - 1.0) < 1e-10);
    CHECK(br.residual < 1e-9);

    auto two = loss_on_kraus_branches(fock_state(FockSpace::uniform(1, 2), {2}), 0, 0.5);
    REQUIRE(two.branches.size() == 3);
    CHECK(two.branches[0].norm_sq() == doctest::Approx(0.25));
    CHECK(two.branches[1].norm_sq() == doctest::Approx(0.5));
    CHECK(two.branches[2].norm_sq() == doctest::Approx(0.25));
}

TEST_CASE("loss properties on random states") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = FockSpace({4, 3});
        auto rho = random_mixed(s, rng);
        double t1 = u(rng), t2 = u(rng);
        std::size_t mode = trial % 2;
        auto twice = pure_loss(pure_loss(rho, mode, t1), mode, t2);
        auto once = pure_loss(rho, mode, t1 * t2);
        CHECK(trace_distance(twice.matrix(), once.matrix()) < 1e-10);
        CHECK(std::abs(once.trace() - 1.0) < 1e-12);
        CHECK(mean_photons(once, mode) == doctest::Approx(t1 * t2 * mean_photons(rho, mode)).epsilon(1e-10));

        auto psi = random_state(s, rng);
        auto br = loss_on_kraus_branches(psi, mode, t1);
        auto sum = DensityOperator::zero(s);
        for (const auto& b : br.branches) sum.add_projector(b);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sum.matrix() - pure_loss(psi, mode, t1).matrix(),
                                                 Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().cwiseAbs().maxCoeff() < 1e-10);
    }
}
