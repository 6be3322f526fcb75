#include "scissorlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <fmt/format.h>

namespace scissorlab {

namespace {

constexpr double kTraceTolerance = 1e-8;

void require_normalized(const DensityOperator& rho) {
    if (std::abs(rho.trace() - 1.0) > kTraceTolerance)
        throw NotNormalized(fmt::format("operator has trace {:.12g}", rho.trace()));
}

void require_two_modes(const FockSpace& sp) {
    if (sp.num_modes() != 2)
        throw DimensionMismatch(fmt::format("expected a two-mode state, got {} modes", sp.num_modes()));
}

}  // namespace

double fidelity(const PureState& state, const PureState& target) {
    if (!(state.space() == target.space())) throw DimensionMismatch("fidelity: spaces differ");
    if (std::abs(target.norm_sq() - 1.0) > kTraceTolerance)
        throw NotNormalized(fmt::format("target has norm^2 {:.12g}", target.norm_sq()));
    double n = state.norm_sq();
    if (!(n > 0.0)) throw ZeroProbability("fidelity of a zero state");
    return std::norm(target.amplitudes().dot(state.amplitudes())) / n;
}

double fidelity(const DensityOperator& state, const PureState& target) {
    if (!(state.space() == target.space())) throw DimensionMismatch("fidelity: spaces differ");
    if (std::abs(target.norm_sq() - 1.0) > kTraceTolerance)
        throw NotNormalized(fmt::format("target has norm^2 {:.12g}", target.norm_sq()));
    double t = state.trace();
    if (!(t > 0.0)) throw ZeroProbability("fidelity of a zero-trace operator");
    const Vector& v = target.amplitudes();
    return std::clamp((v.adjoint() * state.matrix() * v)(0, 0).real() / t, 0.0, 1.0);
}

double von_neumann_entropy(const DensityOperator& rho) {
    require_normalized(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
    double h = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double l = es.eigenvalues()[i];
        if (l > 1e-14) h -= l * std::log2(l);
    }
    return std::max(h, 0.0);
}

double rci(const DensityOperator& rho_ab) {
    require_two_modes(rho_ab.space());
    require_normalized(rho_ab);
    return von_neumann_entropy(partial_trace(rho_ab, {0})) - von_neumann_entropy(rho_ab);
}

CovarianceMatrix covariance_matrix(const DensityOperator& rho_ab, double tol) {
    const auto& sp = rho_ab.space();
    require_two_modes(sp);
    require_normalized(rho_ab);
    double leak = truncation_leakage(rho_ab);
    if (leak > tol)
        throw CutoffTooSmall(fmt::format("top Fock levels hold {:.3g}", leak), leak);

    const Matrix& rho = rho_ab.matrix();
    // Tr(O rho) = sum_n <m|O|n> rho(n, m), with O a product of ladder operators
    // (truncated: raising past the cutoff gives zero), applied right to left.
    struct Ladder {
        std::size_t mode;
        bool raise;
    };
    auto expect = [&](std::initializer_list<Ladder> ops) {
        Complex sum(0.0);
        for (std::size_t n = 0; n < sp.dim(); ++n) {
            std::size_t m = n;
            double coef = 1.0;
            for (auto it = std::rbegin(ops); it != std::rend(ops) && coef != 0.0; ++it) {
                int k = sp.digit(m, it->mode);
                if (it->raise) {
                    if (k == sp.cutoff(it->mode)) coef = 0.0;
                    else {
                        coef *= std::sqrt(k + 1.0);
                        m += sp.stride(it->mode);
                    }
                } else {
                    if (k == 0) coef = 0.0;
                    else {
                        coef *= std::sqrt(static_cast<double>(k));
                        m -= sp.stride(it->mode);
                    }
                }
            }
            if (coef != 0.0) sum += coef * rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
        }
        return sum;
    };

    // b = (a0, a0^dag, a1, a1^dag); S_kl = <b_k b_l>
    Complex first[2], aa[2][2], ada[2][2];
    for (std::size_t i = 0; i < 2; ++i) {
        first[i] = expect({{i, false}});
        for (std::size_t j = 0; j < 2; ++j) {
            aa[i][j] = expect({{i, false}, {j, false}});
            ada[i][j] = expect({{i, true}, {j, false}});  // <a_i^dag a_j>
        }
    }
    Eigen::Vector4cd mb;
    mb << first[0], std::conj(first[0]), first[1], std::conj(first[1]);
    Eigen::Matrix4cd S;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            S(2 * i, 2 * j) = aa[i][j];                                  // a_i a_j
            S(2 * i + 1, 2 * j + 1) = std::conj(aa[j][i]);               // a_i^dag a_j^dag
            S(2 * i + 1, 2 * j) = ada[i][j];                             // a_i^dag a_j
            S(2 * i, 2 * j + 1) = ada[j][i] + (i == j ? 1.0 : 0.0);      // a_i a_j^dag
        }
    Eigen::Matrix4cd sym = 0.5 * (S + S.transpose());
    const Complex I(0.0, 1.0);
    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 2; ++i) {
        M(2 * i, 2 * i) = 1.0;
        M(2 * i, 2 * i + 1) = 1.0;
        M(2 * i + 1, 2 * i) = -I;
        M(2 * i + 1, 2 * i + 1) = I;
    }
    Eigen::Vector4cd mean = M * mb;
    Eigen::Matrix4cd cov = M * sym * M.transpose() - mean * mean.transpose();
    CovarianceMatrix out;
    out.mean = mean.real();
    out.cov = cov.real();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

Eigen::MatrixXd symplectic_form(std::size_t modes) {
    auto n = static_cast<Eigen::Index>(2 * modes);
    Eigen::MatrixXd om = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; i += 2) {
        om(i, i + 1) = 1.0;
        om(i + 1, i) = -1.0;
    }
    return om;
}

void check_covariance(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0)
        throw UnphysicalCovariance("covariance must be square with even dimension");
    if (!cov.allFinite()) throw UnphysicalCovariance("covariance has non-finite entries");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw UnphysicalCovariance("covariance is not symmetric");
    const Complex I(0.0, 1.0);
    Matrix h = cov.cast<Complex>() + I * symplectic_form(static_cast<std::size_t>(cov.rows() / 2)).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw UnphysicalCovariance(
            fmt::format("uncertainty relation violated by {:.3g}", -es.eigenvalues().minCoeff()));
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
    check_covariance(cov);
    const Complex I(0.0, 1.0);
    Matrix m = I * symplectic_form(static_cast<std::size_t>(cov.rows() / 2)).cast<Complex>() *
               cov.cast<Complex>();
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(mods.begin(), mods.end());
    std::vector<double> nu;
    for (std::size_t i = 0; i < mods.size(); i += 2) nu.push_back(0.5 * (mods[i] + mods[i + 1]));
    if (nu.front() < 1.0 - 1e-8)
        throw UnphysicalCovariance(fmt::format("symplectic eigenvalue {:.12g} below 1", nu.front()));
    return nu;
}

double thermal_entropy(double nu) {
    if (nu <= 1.0 + 1e-15) return 0.0;
    double p = 0.5 * (nu + 1.0), m = 0.5 * (nu - 1.0);
    return p * std::log2(p) - m * std::log2(m);
}

double gaussian_rci(const CovarianceMatrix& cm) {
    double ha = 0.0;
    for (double v : symplectic_eigenvalues(cm.cov.topLeftCorner<2, 2>())) ha += thermal_entropy(v);
    double hab = 0.0;
    for (double v : symplectic_eigenvalues(cm.cov)) hab += thermal_entropy(v);
    return ha - hab;
}

double gaussian_rci(const DensityOperator& rho_ab) { return gaussian_rci(covariance_matrix(rho_ab)); }

EntanglementReport entanglement_report(const DensityOperator& rho_ab, double probability) {
    DensityOperator rho = rho_ab.normalized();
    CovarianceMatrix cm = covariance_matrix(rho);
    EntanglementReport r;
    r.geof = gaussian_eof(cm);
    r.rci = rci(rho);
    r.gaussian_rci = gaussian_rci(cm);
    r.probability = probability;
    return r;
}

}  // namespace scissorlab
