#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scissorlab/error.hpp"

namespace scissorlab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Occupation = std::vector<int>;

inline constexpr double kTruncationTolerance = 1e-12;

// Multimode truncated Fock basis. Mode 0 is the most significant digit of
// the flat index, so a two-mode state is laid out as kron(mode0, mode1).
class FockSpace {
public:
    explicit FockSpace(std::vector<int> cutoffs);
    static FockSpace uniform(std::size_t modes, int cutoff);
    // Zero-mode space (dimension 1); what remains after every mode is measured.
    static FockSpace scalar();

    std::size_t num_modes() const { return cutoffs_.size(); }
    int cutoff(std::size_t mode) const;
    const std::vector<int>& cutoffs() const { return cutoffs_; }
    std::size_t dim() const { return dim_; }
    std::size_t stride(std::size_t mode) const;

    std::size_t index(std::span<const int> occupation) const;
    Occupation occupation(std::size_t index) const;
    int digit(std::size_t index, std::size_t mode) const;

    void check_mode(std::size_t mode) const;
    // Space obtained by deleting the given modes.
    FockSpace without(std::span<const std::size_t> modes) const;
    FockSpace with_cutoff(std::size_t mode, int cutoff) const;

    bool operator==(const FockSpace& other) const { return cutoffs_ == other.cutoffs_; }

private:
    FockSpace() = default;
    void init();

    std::vector<int> cutoffs_;
    std::vector<std::size_t> strides_;
    std::size_t dim_ = 1;
};

class PureState {
public:
    PureState(FockSpace space, Vector amplitudes);
    static PureState zero(FockSpace space);

    const FockSpace& space() const { return space_; }
    const Vector& amplitudes() const { return amps_; }
    Complex amplitude(std::span<const int> occupation) const;
    Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

    double norm_sq() const { return amps_.squaredNorm(); }
    bool is_normalized(double tol = kTruncationTolerance) const;
    // Throws ZeroProbability for a zero vector.
    PureState normalized() const;
    PureState scaled(Complex factor) const;

private:
    FockSpace space_;
    Vector amps_;
};

class DensityOperator {
public:
    DensityOperator(FockSpace space, Matrix matrix);
    static DensityOperator zero(FockSpace space);

    const FockSpace& space() const { return space_; }
    const Matrix& matrix() const { return mat_; }

    double trace() const { return mat_.trace().real(); }
    bool is_normalized(double tol = kTruncationTolerance) const;
    DensityOperator normalized() const;
    DensityOperator scaled(double factor) const;
    // Adds |psi><psi| in place; used to accumulate Kraus sums.
    void add_projector(const PureState& psi);
    void add(const DensityOperator& other);

private:
    FockSpace space_;
    Matrix mat_;
};

// --- constructors -----------------------------------------------------------

PureState fock_state(const FockSpace& space, std::span<const int> occupation);
PureState fock_state(const FockSpace& space, std::initializer_list<int> occupation);
PureState vacuum(const FockSpace& space);

PureState coherent_state(const FockSpace& space, std::size_t mode, Complex gamma,
                         double tol = kTruncationTolerance);

enum class Parity { Even, Odd };

// Normalized superposition sum_k w^{-rk} |beta w^k>, w = exp(2 pi i / lobes).
// Fock support is exactly {n : n = residue mod lobes}.
PureState cat_state(const FockSpace& space, std::size_t mode, Complex beta, int lobes,
                    int residue, double tol = kTruncationTolerance);
PureState cat2_state(const FockSpace& space, std::size_t mode, Complex beta, Parity parity,
                     double tol = kTruncationTolerance);
PureState cat4_state(const FockSpace& space, std::size_t mode, Complex beta, int residue,
                     double tol = kTruncationTolerance);

// sqrt(1 - chi^2) sum_n chi^n |n, n> on two modes of equal cutoff.
PureState epr_state(double chi, int cutoff, double tol = kTruncationTolerance);

// --- structure --------------------------------------------------------------

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator to_density(const PureState& psi);
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep);
DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<std::size_t> keep);

// Copies amplitudes into a space whose cutoffs are all at least as large.
PureState embed(const PureState& psi, const FockSpace& larger);
DensityOperator embed(const DensityOperator& rho, const FockSpace& larger);

// Sum over modes of the population sitting in that mode's top Fock level.
double truncation_leakage(const PureState& psi);
double truncation_leakage(const DensityOperator& rho);

// Applies a single-mode operator; op may be rectangular, in which case the
// mode's cutoff becomes op.rows() - 1.
PureState apply_local(const PureState& psi, std::size_t mode, const Matrix& op);
DensityOperator apply_local(const DensityOperator& rho, std::size_t mode, const Matrix& op);

// Single-mode number-basis helpers.
double log_factorial(int n);
double binomial(int n, int k);
Matrix number_operator(int cutoff);
Matrix lowering_operator(int cutoff);

// First nonzero amplitude gets non-negative real part.
PureState canonical_phase(const PureState& psi);

}  // namespace scissorlab
