#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "scissorlab/metrics.hpp"

namespace scissorlab {

namespace {

using Eigen::Matrix2d;
using Eigen::Matrix4d;

// M = a S S^T with S symplectic (det S = 1) and a = sqrt(det M).
std::pair<double, Matrix2d> local_williamson(const Matrix2d& m) {
    double a = std::sqrt(m.determinant());
    Eigen::SelfAdjointEigenSolver<Matrix2d> es(m);
    Matrix2d u = es.eigenvectors();
    if (u.determinant() < 0) u.col(1) *= -1.0;
    Eigen::Vector2d w = es.eigenvalues();
    Matrix2d s = u * (w / a).cwiseSqrt().asDiagonal();
    return {a, s};
}

struct StandardForm {
    double a, b, c1, c2;
};

// Local symplectic reduction to [[a,0,c1,0],[0,a,0,c2],[c1,0,b,0],[0,c2,0,b]].
StandardForm standard_form(const Matrix4d& v) {
    auto [a, sa] = local_williamson(v.topLeftCorner<2, 2>());
    auto [b, sb] = local_williamson(v.bottomRightCorner<2, 2>());
    Matrix2d cn = sa.inverse() * v.topRightCorner<2, 2>() * sb.inverse().transpose();
    Eigen::JacobiSVD<Matrix2d> svd(cn, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector2d d = svd.singularValues();
    // keep both rotations proper; a reflection flips the sign of c2
    if (svd.matrixU().determinant() < 0) d[1] = -d[1];
    if (svd.matrixV().determinant() < 0) d[1] = -d[1];
    return {a, b, d[0], d[1]};
}

// Smallest symplectic eigenvalue of the partial transpose, from the invariants
// det A + det B - 2 det C and det V.
double min_pt_eigenvalue(const Matrix4d& v) {
    double delta = v.topLeftCorner<2, 2>().determinant() + v.bottomRightCorner<2, 2>().determinant() -
                   2.0 * v.topRightCorner<2, 2>().determinant();
    double disc = std::max(delta * delta - 4.0 * v.determinant(), 0.0);
    return std::sqrt(std::max(0.5 * (delta - std::sqrt(disc)), 0.0));
}

double correlation_sq(const Matrix2d& x) { return x(0, 1) * x(0, 1) / (x(0, 0) * x(1, 1)); }

}  // namespace

double gaussian_eof(const Eigen::Matrix4d& cov) {
    check_covariance(cov);
    // separable iff the partial transpose is still physical
    if (min_pt_eigenvalue(cov) >= 1.0 - 1e-12) return 0.0;

    StandardForm sf = standard_form(cov);
    Matrix2d upper, lower;
    upper << sf.a, sf.c1, sf.c1, sf.b;
    lower << sf.a, sf.c2, sf.c2, sf.b;
    lower = lower.inverse().eval();
    // Decompositions are parametrized by the x-block X of the pure state,
    // lower <= X <= upper. The optimum sits on the boundary of that interval:
    // X = lower + R W R with R = (upper - lower)^{1/2} and W on the boundary of
    // [0, 1]: rank-one W = s vv^T (patch 0) or W = qq^T + s vv^T (patch 1).
    Eigen::SelfAdjointEigenSolver<Matrix2d> es(upper - lower);
    Matrix2d r = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                 es.eigenvectors().transpose();
    auto objective = [&](double theta, double s, int patch) {
        Eigen::Vector2d v(std::cos(theta), std::sin(theta)), q(-std::sin(theta), std::cos(theta));
        Matrix2d w = s * v * v.transpose();
        if (patch == 1) w += q * q.transpose();
        return correlation_sq(lower + r * w * r);
    };

    constexpr double pi = std::numbers::pi;
    constexpr int n_theta = 90, n_s = 31, n_starts = 5;
    const int bits = std::numeric_limits<double>::digits / 2;
    struct Start {
        double value, theta, s;
        int patch;
    };
    std::vector<Start> grid;
    for (int patch = 0; patch < 2; ++patch)
        for (int i = 0; i < n_theta; ++i)
            for (int j = 0; j < n_s; ++j) {
                double th = pi * i / n_theta, s = static_cast<double>(j) / (n_s - 1);
                grid.push_back({objective(th, s, patch), th, s, patch});
            }
    std::stable_sort(grid.begin(), grid.end(),
                     [](const Start& x, const Start& y) { return x.value < y.value; });

    double best = grid.front().value;
    for (int k = 0; k < n_starts && k < static_cast<int>(grid.size()); ++k) {
        const Start& st = grid[static_cast<std::size_t>(k)];
        auto inner = [&](double th) {
            std::uintmax_t it = 200;
            auto m = boost::math::tools::brent_find_minima(
                [&](double s) { return objective(th, s, st.patch); }, 0.0, 1.0, bits, it);
            return std::min({m.second, objective(th, 0.0, st.patch), objective(th, 1.0, st.patch)});
        };
        std::uintmax_t it = 200;
        double step = pi / n_theta;
        auto m = boost::math::tools::brent_find_minima(inner, st.theta - step, st.theta + step, bits, it);
        best = std::min(best, m.second);
    }
    if (!std::isfinite(best) || best < -1e-12 || best >= 1.0)
        throw ConvergenceFailure(fmt::format("entanglement minimization ended at {:.6g}", best));
    best = std::max(best, 0.0);
    return thermal_entropy(1.0 / std::sqrt(1.0 - best));
}

double gaussian_eof(const CovarianceMatrix& cm) { return gaussian_eof(cm.cov); }

CovarianceMatrix epr_loss_covariance(double chi, double T) {
    if (!(chi >= 0.0 && chi < 1.0))
        throw ParameterOutOfRange(fmt::format("EPR parameter {} outside [0, 1)", chi));
    if (!(T >= 0.0 && T <= 1.0))
        throw ParameterOutOfRange(fmt::format("channel transmissivity {} outside [0, 1]", T));
    double nu = (1.0 + chi * chi) / (1.0 - chi * chi);
    double c = 2.0 * chi / (1.0 - chi * chi) * std::sqrt(T);
    double nb = T * nu + 1.0 - T;
    CovarianceMatrix cm;
    cm.cov << nu, 0, c, 0,  //
        0, nu, 0, -c,       //
        c, 0, nb, 0,        //
        0, -c, 0, nb;
    return cm;
}

double deterministic_bound(double T) {
    if (!(T > 0.0 && T < 1.0))
        throw ParameterOutOfRange(fmt::format("channel transmissivity {} outside (0, 1)", T));
    const std::array<double, 3> eps{1e-2, 1e-3, 1e-4};
    std::array<double, 3> f{};
    for (std::size_t i = 0; i < eps.size(); ++i)
        f[i] = gaussian_eof(epr_loss_covariance(1.0 - eps[i], T));
    double r1 = (10.0 * f[1] - f[0]) / 9.0;
    double r2 = (10.0 * f[2] - f[1]) / 9.0;
    if (!(std::abs(r2 - r1) < 1e-4))
        throw ConvergenceFailure(
            fmt::format("bound extrapolation did not settle: {:.8g} vs {:.8g}", r1, r2));
    return r2;
}

}  // namespace scissorlab
