#pragma once

#include <vector>

#include "scissorlab/fock.hpp"

namespace scissorlab {

// <target|rho|target> with the state normalized first; target must be normalized.
double fidelity(const PureState& state, const PureState& target);
double fidelity(const DensityOperator& state, const PureState& target);

// -Tr rho log2 rho over eigenvalues above 1e-14. Requires unit trace.
double von_neumann_entropy(const DensityOperator& rho);

// H(A) - H(AB) for a two-mode state, A = mode 0.
double rci(const DensityOperator& rho_ab);

// Quadratures x = a + a^dag, p = -i(a - a^dag); vacuum covariance is the identity.
struct CovarianceMatrix {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
};

// Moments are taken with normal ordering (lowering operators only), so a state
// whose support ends below the cutoff gives exact results. Throws
// CutoffTooSmall when the top Fock level of some mode holds more than `tol`.
CovarianceMatrix covariance_matrix(const DensityOperator& rho_ab, double tol = 1e-10);

// Symplectic form of n modes, blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(std::size_t modes);

// Throws UnphysicalCovariance if cov is not symmetric within 1e-10 or violates
// cov + i Omega >= 0 by more than 1e-8.
void check_covariance(const Eigen::MatrixXd& cov);

// Moduli of the eigenvalues of i Omega cov, one per mode, ascending.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& cov);

// ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2); 0 at x = 1.
double thermal_entropy(double nu);

double gaussian_rci(const CovarianceMatrix& cm);
double gaussian_rci(const DensityOperator& rho_ab);

// Gaussian entanglement of formation in ebits; 0 for separable covariances.
double gaussian_eof(const CovarianceMatrix& cm);
double gaussian_eof(const Eigen::Matrix4d& cov);

// Two-mode squeezed vacuum (parameter chi) with its second arm through pure loss T.
CovarianceMatrix epr_loss_covariance(double chi, double T);

// Gaussian EOF reachable through loss T with infinite squeezing, by Richardson
// extrapolation of chi = 1 - eps for eps in {1e-2, 1e-3, 1e-4}.
double deterministic_bound(double T);

struct EntanglementReport {
    double geof = 0.0;
    double rci = 0.0;
    double gaussian_rci = 0.0;
    double probability = 0.0;
};

// rho_ab may be unnormalized; it is normalized before every metric.
EntanglementReport entanglement_report(const DensityOperator& rho_ab, double probability);

}  // namespace scissorlab
