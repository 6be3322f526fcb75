#include <doctest.h>

#include <cmath>
#include <random>

#include "scissorlab/channels.hpp"
#include "scissorlab/circuit.hpp"
#include "scissorlab/distillation.hpp"
#include "scissorlab/metrics.hpp"
#include "support.hpp"

using namespace scissorlab;
using scissorlab::testing::random_mixed;
using scissorlab::testing::random_state;

namespace {

double tmsv_entropy(double r) {
    double c = std::cosh(r) * std::cosh(r), s = std::sinh(r) * std::sinh(r);
    return c * std::log2(c) - s * std::log2(s);
}

double h(double x) {
    if (x <= 1 + 1e-15) return 0.0;
    double a = (x + 1) / 2, b = (x - 1) / 2;
    return a * std::log2(a) - b * std::log2(b);
}

// Exhaustive scan for covariances already in standard form
// [[a,0,c1,0],[0,a,0,c2],[c1,0,b,0],[0,c2,0,b]]: pure-state x-blocks X with
// L <= X <= U, minimizing the squared correlation X01^2 / (X00 X11).
// Returns an upper estimate of the true GEOF.
double brute_force_geof(double a, double b, double c1, double c2) {
    Eigen::Matrix2d U, L;
    U << a, c1, c1, b;
    L << a, c2, c2, b;
    L = L.inverse().eval();
    double best = 1.0;
    // U - L of rank one (one arm purified): the interval is the segment L + t w w^T
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> gap(U - L);
    if (gap.eigenvalues()[0] < 1e-9 * gap.eigenvalues()[1]) {
        Eigen::Vector2d w = gap.eigenvectors().col(1);
        const int n = 400000;
        for (int i = 0; i <= n; ++i) {
            Eigen::Matrix2d X = L + gap.eigenvalues()[1] * i / n * w * w.transpose();
            best = std::min(best, X(0, 1) * X(0, 1) / (X(0, 0) * X(1, 1)));
        }
        return h(1 / std::sqrt(1 - best));
    }
    const int nx = 700, ny = 500;
    for (int i = 0; i <= nx; ++i) {
        double x1 = L(0, 0) + (U(0, 0) - L(0, 0)) * i / nx;
        for (int j = 0; j <= ny; ++j) {
            double x2 = L(1, 1) + (U(1, 1) - L(1, 1)) * j / ny;
            double ru = std::sqrt(std::max((U(0, 0) - x1) * (U(1, 1) - x2), 0.0));
            double rl = std::sqrt(std::max((x1 - L(0, 0)) * (x2 - L(1, 1)), 0.0));
            double lo = std::max(U(0, 1) - ru, L(0, 1) - rl), hi = std::min(U(0, 1) + ru, L(0, 1) + rl);
            if (lo > hi) continue;
            double z = (lo <= 0 && 0 <= hi) ? 0.0 : (lo > 0 ? lo : hi);
            best = std::min(best, z * z / (x1 * x2));
        }
    }
    return h(1 / std::sqrt(1 - best));
}

Eigen::Matrix4d standard(double a, double b, double c1, double c2) {
    Eigen::Matrix4d v;
    v << a, 0, c1, 0, 0, a, 0, c2, c1, 0, b, 0, 0, c2, 0, b;
    return v;
}

// Local symplectic: rotation by phi then squeezing r on each mode.
Eigen::Matrix4d local_symplectic(double phi1, double r1, double phi2, double r2) {
    auto one = [](double phi, double r) {
        Eigen::Matrix2d rot, sq;
        rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
        sq << std::exp(r), 0, 0, std::exp(-r);
        return Eigen::Matrix2d(sq * rot);
    };
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    s.topLeftCorner<2, 2>() = one(phi1, r1);
    s.bottomRightCorner<2, 2>() = one(phi2, r2);
    return s;
}

DensityOperator rotate(const DensityOperator& rho, double t0, double t1) {
    auto phase = [](int cutoff, double t) {
        Matrix d = Matrix::Zero(cutoff + 1, cutoff + 1);
        for (int n = 0; n <= cutoff; ++n) d(n, n) = std::polar(1.0, n * t);
        return d;
    };
    auto r = apply_local(rho, 0, phase(rho.space().cutoff(0), t0));
    return apply_local(r, 1, phase(rho.space().cutoff(1), t1));
}

}  // namespace

TEST_CASE("fidelity") {
    std::mt19937_64 rng(1);
    auto s = FockSpace::uniform(1, 4);
    auto psi = random_state(s, rng);
    CHECK(fidelity(psi, psi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(fock_state(s, {1}), fock_state(s, {2})) == 0.0);
    CHECK(fidelity(to_density(psi), psi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(psi.scaled(0.1), psi) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(fidelity(psi, psi.scaled(2.0)), NotNormalized);
    CHECK_THROWS_AS(fidelity(psi, vacuum(FockSpace::uniform(1, 5))), DimensionMismatch);
}

TEST_CASE("von Neumann entropy") {
    std::mt19937_64 rng(2);
    CHECK(von_neumann_entropy(to_density(random_state(FockSpace::uniform(2, 3), rng))) == doctest::Approx(0.0).epsilon(1e-12));
    Matrix half = Matrix::Identity(2, 2) * 0.5;
    CHECK(von_neumann_entropy(DensityOperator(FockSpace::uniform(1, 1), half)) == doctest::Approx(1.0));
    auto reduced = partial_trace(to_density(epr_state(0.3, 30)), {0});
    double nbar = 0.09 / 0.91;
    double thermal = (nbar + 1) * std::log2(nbar + 1) - nbar * std::log2(nbar);
    CHECK(von_neumann_entropy(reduced) == doctest::Approx(thermal).epsilon(1e-10));
    CHECK(von_neumann_entropy(reduced) == doctest::Approx(0.480).epsilon(1e-3));
    CHECK_THROWS_AS(von_neumann_entropy(reduced.scaled(0.5)), NotNormalized);

    // additivity
    for (int trial = 0; trial < 5; ++trial) {
        auto a = random_mixed(FockSpace::uniform(1, 3), rng, 2), b = random_mixed(FockSpace::uniform(1, 2), rng, 3);
        CHECK(von_neumann_entropy(tensor(a, b)) ==
              doctest::Approx(von_neumann_entropy(a) + von_neumann_entropy(b)).epsilon(1e-10));
    }
}

TEST_CASE("reverse coherent information") {
    std::mt19937_64 rng(3);
    auto epr = to_density(epr_state(0.3, 30));
    CHECK(rci(epr) == doctest::Approx(von_neumann_entropy(partial_trace(epr, {0}))).epsilon(1e-10));
    CHECK(rci(epr) == doctest::Approx(0.480).epsilon(1e-3));
    auto a = random_mixed(FockSpace::uniform(1, 2), rng), b = random_mixed(FockSpace::uniform(1, 2), rng);
    CHECK(rci(tensor(a, b)) == doctest::Approx(-von_neumann_entropy(b)).epsilon(1e-10));
    CHECK(rci(to_density(epr_state(0.0, 3))) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("covariance matrices") {
    auto vac = covariance_matrix(to_density(vacuum(FockSpace::uniform(2, 2))));
    CHECK((vac.cov - Eigen::Matrix4d::Identity()).norm() < 1e-15);
    CHECK(vac.mean.norm() < 1e-15);

    for (double chi : {0.1, 0.3, 0.5}) {
        auto cm = covariance_matrix(to_density(epr_state(chi, 40)));
        double nu = (1 + chi * chi) / (1 - chi * chi), c = 2 * chi / (1 - chi * chi);
        Eigen::Matrix4d expect;
        expect << nu, 0, c, 0, 0, nu, 0, -c, c, 0, nu, 0, 0, -c, 0, nu;
        CHECK((cm.cov - expect).norm() < 1e-10);
        CHECK((epr_loss_covariance(chi, 1.0).cov - expect).norm() < 1e-12);
        auto sym = symplectic_eigenvalues(cm.cov);
        CHECK(sym[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(sym[1] == doctest::Approx(1.0).epsilon(1e-6));
    }

    Complex gamma(0.3, -0.2);
    auto coh = tensor(coherent_state(FockSpace::uniform(1, 20), 0, gamma), vacuum(FockSpace::uniform(1, 2)));
    auto cm = covariance_matrix(to_density(coh));
    CHECK((cm.cov - Eigen::Matrix4d::Identity()).norm() < 1e-10);
    CHECK(cm.mean[0] == doctest::Approx(0.6));
    CHECK(cm.mean[1] == doctest::Approx(-0.4));
    CHECK(std::abs(cm.mean[2]) < 1e-15);

    CHECK_THROWS_AS(covariance_matrix(to_density(tensor(coherent_state(FockSpace::uniform(1, 3), 0, 0.9, 1.0).normalized(),
                                                        vacuum(FockSpace::uniform(1, 2))))),
                    CutoffTooSmall);
    CHECK_THROWS_AS(covariance_matrix(to_density(fock_state(FockSpace::uniform(2, 1), {1, 0}))), CutoffTooSmall);
}

TEST_CASE("symplectic eigenvalues of states") {
    // pure Gaussian: two-mode squeezed vacuum through a beamsplitter and a phase shift
    Circuit c(FockSpace::uniform(2, 30));
    c.beamsplitter(0, 1, 0.3).phase(1, 0.7);
    auto mixed = c.apply(epr_state(0.4, 30)).front();
    auto sym = symplectic_eigenvalues(covariance_matrix(to_density(mixed)).cov);
    CHECK(sym[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sym[1] == doctest::Approx(1.0).epsilon(1e-8));

    // arbitrary states respect the uncertainty relation
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        // support below the cutoff keeps the moments exact
        auto rho = random_mixed(FockSpace::uniform(2, 5), rng, 2, 4);
        auto v = symplectic_eigenvalues(covariance_matrix(rho).cov);
        CHECK(v[0] >= 1.0 - 1e-12);
    }
}

TEST_CASE("symplectic eigenvalues") {
    auto v = symplectic_eigenvalues(Eigen::MatrixXd::Identity(4, 4));
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(1.0));
    Eigen::MatrixXd th = Eigen::MatrixXd::Identity(4, 4);
    th.topLeftCorner(2, 2) *= 3.0;
    th.bottomRightCorner(2, 2) *= 2.0;
    auto t = symplectic_eigenvalues(th);
    CHECK(t[0] == doctest::Approx(2.0));
    CHECK(t[1] == doctest::Approx(3.0));
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2) * 0.5;
    CHECK_THROWS_AS(symplectic_eigenvalues(bad), UnphysicalCovariance);
    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
    asym(0, 1) = 0.1;
    CHECK_THROWS_AS(check_covariance(asym), UnphysicalCovariance);
}

TEST_CASE("Gaussian RCI") {
    CHECK(gaussian_rci(CovarianceMatrix{}) == doctest::Approx(0.0).epsilon(1e-12));
    auto epr = to_density(epr_state(0.3, 30));
    CHECK(gaussian_rci(epr) == doctest::Approx(rci(epr)).epsilon(1e-6));
    // Gaussian states: both agree
    for (double T : {0.1, 0.5, 0.9}) {
        auto lossy = pure_loss(epr_state(0.3, 16), 1, T);
        auto padded = embed(lossy, FockSpace({lossy.space().cutoff(0) + 1, lossy.space().cutoff(1) + 1}));
        CHECK(std::abs(gaussian_rci(padded) - rci(lossy)) < 1e-6);
        CHECK(std::abs(gaussian_rci(epr_loss_covariance(0.3, T)) - rci(lossy)) < 1e-6);
    }
    // heralded single-photon scissor output is strongly non-Gaussian
    auto rho = epr_scissor_state(0.3, 0.1, 3.0, 1, epr_branch_cutoff(0.3, 0.1, 3.0, 1)).normalized();
    auto padded = embed(rho, FockSpace({rho.space().cutoff(0) + 1, rho.space().cutoff(1) + 1}));
    CHECK(gaussian_rci(padded) < rci(rho));
}

TEST_CASE("Gaussian EOF: pure states") {
    for (double r : {0.1, 0.3, 0.5, 1.0}) {
        auto cm = epr_loss_covariance(std::tanh(r), 1.0);
        CHECK(gaussian_eof(cm) == doctest::Approx(tmsv_entropy(r)).epsilon(1e-6));
        CHECK(std::abs(gaussian_eof(cm) - tmsv_entropy(r)) < 1e-6);
        // equals the entropy of the reduced Fock-space state
        if (r <= 0.5) {
            auto reduced = partial_trace(to_density(epr_state(std::tanh(r), 40)), {0});
            CHECK(std::abs(gaussian_eof(cm) - von_neumann_entropy(reduced)) < 1e-5);
        }
    }
    CHECK(gaussian_eof(Eigen::Matrix4d::Identity()) == 0.0);
    Eigen::Matrix4d product = Eigen::Matrix4d::Identity();
    product.topLeftCorner<2, 2>() *= 2.5;
    CHECK(gaussian_eof(product) == 0.0);
}

TEST_CASE("Gaussian EOF against an exhaustive scan") {
    struct Case {
        double a, b, c1, c2;
    };
    std::vector<Case> cases;
    for (auto [chi, T] : {std::pair{0.3, 0.1}, {0.6, 0.5}, {0.9, 0.3}, {0.7, 0.8}}) {
        auto v = epr_loss_covariance(chi, T).cov;
        cases.push_back({v(0, 0), v(2, 2), v(0, 2), v(1, 3)});
    }
    // thermal noise on both arms; asymmetric correlations
    cases.push_back({2.4, 1.9, 1.5, -1.2});
    cases.push_back({3.0, 2.0, 2.0, -1.6});
    cases.push_back({1.8, 2.6, 1.6, -1.1});
    for (const auto& c : cases) {
        Eigen::Matrix4d v = standard(c.a, c.b, c.c1, c.c2);
        check_covariance(v);
        double e = gaussian_eof(v), brute = brute_force_geof(c.a, c.b, c.c1, c.c2);
        CHECK(e > 0.0);
        CHECK(e <= brute + 1e-9);
        CHECK(brute - e < 2e-3 * std::max(1.0, e));
        // invariant under local symplectic transformations, up to the optimizer's resolution
        Eigen::Matrix4d s = local_symplectic(0.4, 0.3, -1.1, -0.2);
        CHECK(std::abs(gaussian_eof(Eigen::Matrix4d(s * v * s.transpose())) - e) < 1e-7);
    }
    // separable mixed state: weak correlations on a noisy background
    CHECK(gaussian_eof(standard(2.0, 2.0, 0.5, -0.5)) == 0.0);
}

TEST_CASE("deterministic bound") {
    double b1 = deterministic_bound(0.1), b2 = deterministic_bound(0.2);
    CHECK(b2 > b1);
    // weak channel: vanishes roughly like -T log2 T
    double tiny = deterministic_bound(1e-4);
    CHECK(tiny > 0.0);
    CHECK(tiny < 2e-3);
    CHECK(tiny < deterministic_bound(1e-3));
    CHECK(b1 == doctest::Approx(0.5211062).epsilon(1e-6));
    // any finite squeezing stays below the bound
    for (double chi : {0.3, 0.9, 0.99}) CHECK(gaussian_eof(epr_loss_covariance(chi, 0.1)) < b1);
    CHECK_THROWS_AS(deterministic_bound(0.0), ParameterOutOfRange);
}

TEST_CASE("metrics are invariant under local phase rotations") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0.0, 6.283);
    auto rho = epr_device_state(0.3, 0.1, ScissorSpec{1, 2.0, -1, 0.8, DetectorModel::pnr(0.8)}, 14).normalized();
    auto padded = embed(rho, FockSpace({rho.space().cutoff(0) + 1, rho.space().cutoff(1) + 1}));
    auto base = entanglement_report(padded, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto r = entanglement_report(rotate(padded, angle(rng), angle(rng)), 1.0);
        CHECK(std::abs(r.geof - base.geof) < 1e-7);
        CHECK(std::abs(r.rci - base.rci) < 1e-8);
        CHECK(std::abs(r.gaussian_rci - base.gaussian_rci) < 1e-8);
    }
}
