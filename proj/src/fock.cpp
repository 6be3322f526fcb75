#include "scissorlab/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace scissorlab {

// ---------------------------------------------------------------- FockSpace

FockSpace::FockSpace(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw ParameterOutOfRange("FockSpace needs at least one mode");
    for (int c : cutoffs_)
        if (c < 1) throw ParameterOutOfRange(fmt::format("cutoff {} < 1", c));
    init();
}

FockSpace FockSpace::uniform(std::size_t modes, int cutoff) {
    return FockSpace(std::vector<int>(modes, cutoff));
}

FockSpace FockSpace::scalar() {
    FockSpace s;
    s.init();
    return s;
}

void FockSpace::init() {
    strides_.assign(cutoffs_.size(), 1);
    dim_ = 1;
    for (std::size_t m = cutoffs_.size(); m-- > 0;) {
        strides_[m] = dim_;
        dim_ *= static_cast<std::size_t>(cutoffs_[m] + 1);
    }
}

void FockSpace::check_mode(std::size_t mode) const {
    if (mode >= cutoffs_.size())
        throw ModeOutOfRange(fmt::format("mode {} out of range for {}-mode space", mode,
                                         cutoffs_.size()));
}

int FockSpace::cutoff(std::size_t mode) const {
    check_mode(mode);
    return cutoffs_[mode];
}

std::size_t FockSpace::stride(std::size_t mode) const {
    check_mode(mode);
    return strides_[mode];
}

std::size_t FockSpace::index(std::span<const int> occ) const {
    if (occ.size() != cutoffs_.size())
        throw DimensionMismatch(fmt::format("occupation has {} entries, space has {} modes",
                                            occ.size(), cutoffs_.size()));
    std::size_t idx = 0;
    for (std::size_t m = 0; m < occ.size(); ++m) {
        if (occ[m] < 0 || occ[m] > cutoffs_[m])
            throw OccupationOutOfRange(
                fmt::format("occupation {} on mode {} exceeds cutoff {}", occ[m], m, cutoffs_[m]));
        idx += static_cast<std::size_t>(occ[m]) * strides_[m];
    }
    return idx;
}

Occupation FockSpace::occupation(std::size_t index) const {
    Occupation occ(cutoffs_.size());
    for (std::size_t m = 0; m < cutoffs_.size(); ++m) occ[m] = digit(index, m);
    return occ;
}

int FockSpace::digit(std::size_t index, std::size_t mode) const {
    return static_cast<int>((index / strides_[mode]) % static_cast<std::size_t>(cutoffs_[mode] + 1));
}

FockSpace FockSpace::without(std::span<const std::size_t> modes) const {
    std::vector<int> rest;
    for (std::size_t m = 0; m < cutoffs_.size(); ++m)
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) rest.push_back(cutoffs_[m]);
    for (auto m : modes) check_mode(m);
    if (rest.empty()) return scalar();
    return FockSpace(std::move(rest));
}

FockSpace FockSpace::with_cutoff(std::size_t mode, int cutoff) const {
    check_mode(mode);
    auto c = cutoffs_;
    c[mode] = cutoff;
    return FockSpace(std::move(c));
}

// --------------------------------------------------------------- PureState

PureState::PureState(FockSpace space, Vector amplitudes)
    : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != space_.dim())
        throw DimensionMismatch(fmt::format("{} amplitudes for a space of dimension {}",
                                            amps_.size(), space_.dim()));
}

PureState PureState::zero(FockSpace space) {
    auto d = static_cast<Eigen::Index>(space.dim());
    return PureState(std::move(space), Vector::Zero(d));
}

Complex PureState::amplitude(std::span<const int> occ) const {
    return amps_[static_cast<Eigen::Index>(space_.index(occ))];
}

bool PureState::is_normalized(double tol) const { return std::abs(norm_sq() - 1.0) < tol; }

PureState PureState::normalized() const {
    double n = norm_sq();
    if (!(n > 0.0)) throw ZeroProbability("cannot normalize a zero vector");
    return PureState(space_, amps_ / std::sqrt(n));
}

PureState PureState::scaled(Complex factor) const { return PureState(space_, amps_ * factor); }

// --------------------------------------------------------- DensityOperator

DensityOperator::DensityOperator(FockSpace space, Matrix matrix)
    : space_(std::move(space)), mat_(std::move(matrix)) {
    auto d = static_cast<Eigen::Index>(space_.dim());
    if (mat_.rows() != d || mat_.cols() != d)
        throw DimensionMismatch(fmt::format("{}x{} matrix for a space of dimension {}",
                                            mat_.rows(), mat_.cols(), d));
}

DensityOperator DensityOperator::zero(FockSpace space) {
    auto d = static_cast<Eigen::Index>(space.dim());
    return DensityOperator(std::move(space), Matrix::Zero(d, d));
}

bool DensityOperator::is_normalized(double tol) const { return std::abs(trace() - 1.0) < tol; }

DensityOperator DensityOperator::normalized() const {
    double t = trace();
    if (!(t > 0.0)) throw ZeroProbability("cannot normalize a zero-trace operator");
    return DensityOperator(space_, mat_ / t);
}

DensityOperator DensityOperator::scaled(double factor) const {
    return DensityOperator(space_, mat_ * factor);
}

void DensityOperator::add_projector(const PureState& psi) {
    if (!(psi.space() == space_)) throw DimensionMismatch("projector from a different space");
    mat_.noalias() += psi.amplitudes() * psi.amplitudes().adjoint();
}

void DensityOperator::add(const DensityOperator& other) {
    if (!(other.space_ == space_)) throw DimensionMismatch("operator from a different space");
    mat_ += other.mat_;
}

// ------------------------------------------------------------ numerics

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

Matrix number_operator(int cutoff) {
    Matrix n = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int k = 0; k <= cutoff; ++k) n(k, k) = k;
    return n;
}

Matrix lowering_operator(int cutoff) {
    Matrix a = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int k = 1; k <= cutoff; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

PureState canonical_phase(const PureState& psi) {
    const auto& a = psi.amplitudes();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != Complex(0.0)) {
            if (a[i].real() < 0.0) return psi.scaled(-1.0);
            break;
        }
    }
    return psi;
}

// ---------------------------------------------------------- constructors

PureState fock_state(const FockSpace& space, std::span<const int> occupation) {
    auto psi = PureState::zero(space);
    Vector v = psi.amplitudes();
    v[static_cast<Eigen::Index>(space.index(occupation))] = 1.0;
    return PureState(space, std::move(v));
}

PureState fock_state(const FockSpace& space, std::initializer_list<int> occupation) {
    return fock_state(space, std::span<const int>(occupation.begin(), occupation.size()));
}

PureState vacuum(const FockSpace& space) {
    return fock_state(space, Occupation(space.num_modes(), 0));
}

namespace {

// Places single-mode amplitudes on `mode`, all other modes in vacuum.
PureState single_mode(const FockSpace& space, std::size_t mode, const Vector& amps) {
    space.check_mode(mode);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    for (Eigen::Index n = 0; n < amps.size(); ++n)
        v[n * static_cast<Eigen::Index>(space.stride(mode))] = amps[n];
    return canonical_phase(PureState(space, std::move(v)));
}

// Poissonian amplitude e^{-|z|^2/2} z^n / sqrt(n!) evaluated in log space.
Complex poisson_amplitude(Complex z, int n) {
    if (n == 0) return std::exp(-0.5 * std::norm(z));
    if (z == Complex(0.0)) return 0.0;
    double logmag = -0.5 * std::norm(z) + n * std::log(std::abs(z)) - 0.5 * log_factorial(n);
    return std::polar(std::exp(logmag), n * std::arg(z));
}

// Sum of |amplitude|^2 over n > cutoff with n = residue mod step.
double poisson_tail(double mean, int cutoff, int step, int residue) {
    double tail = 0.0;
    int n = cutoff + 1;
    while ((n - residue) % step != 0) ++n;
    for (;; n += step) {
        double term = std::exp(-mean + n * std::log(mean) - log_factorial(n));
        tail += term;
        if (n > mean && term <= 1e-18 * tail) break;
        if (n > cutoff + 100000) break;
    }
    return tail;
}

}  // namespace

PureState coherent_state(const FockSpace& space, std::size_t mode, Complex gamma, double tol) {
    int cutoff = space.cutoff(mode);
    double mean = std::norm(gamma);
    if (mean > 0.0) {
        double leak = poisson_tail(mean, cutoff, 1, 0);
        if (leak > tol)
            throw CutoffTooSmall(
                fmt::format("coherent amplitude {} leaks {:.3g} beyond cutoff {}", std::abs(gamma),
                            leak, cutoff),
                leak);
    }
    Vector amps(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) amps[n] = poisson_amplitude(gamma, n);
    return single_mode(space, mode, amps);
}

PureState cat_state(const FockSpace& space, std::size_t mode, Complex beta, int lobes, int residue,
                    double tol) {
    if (lobes < 1 || residue < 0 || residue >= lobes)
        throw ParameterOutOfRange(fmt::format("cat with {} lobes, residue {}", lobes, residue));
    int cutoff = space.cutoff(mode);
    double mean = std::norm(beta);
    if (mean == 0.0) {
        if (residue != 0) throw DegenerateCat("cat state with beta = 0 and nonzero residue");
        return vacuum(space);
    }
    // Normalize against the untruncated residue class.
    double kept = 0.0;
    for (int n = residue; n <= cutoff; n += lobes) kept += std::norm(poisson_amplitude(beta, n));
    double tail = poisson_tail(mean, cutoff, lobes, residue);
    double total = kept + tail;
    if (!(total > 1e-300)) throw DegenerateCat("cat state has vanishing norm");
    double leak = tail / total;
    if (leak > tol)
        throw CutoffTooSmall(
            fmt::format("cat amplitude {} leaks {:.3g} beyond cutoff {}", std::abs(beta), leak,
                        cutoff),
            leak);
    Vector amps = Vector::Zero(cutoff + 1);
    double scale = 1.0 / std::sqrt(total);
    for (int n = residue; n <= cutoff; n += lobes) amps[n] = poisson_amplitude(beta, n) * scale;
    return single_mode(space, mode, amps);
}

PureState cat2_state(const FockSpace& space, std::size_t mode, Complex beta, Parity parity,
                     double tol) {
    return cat_state(space, mode, beta, 2, parity == Parity::Odd ? 1 : 0, tol);
}

PureState cat4_state(const FockSpace& space, std::size_t mode, Complex beta, int residue,
                     double tol) {
    return cat_state(space, mode, beta, 4, residue, tol);
}

PureState epr_state(double chi, int cutoff, double tol) {
    if (!(chi >= 0.0 && chi < 1.0))
        throw ParameterOutOfRange(fmt::format("EPR parameter {} outside [0, 1)", chi));
    auto space = FockSpace::uniform(2, cutoff);
    double leak = std::pow(chi, 2.0 * (cutoff + 1));
    if (leak > tol)
        throw CutoffTooSmall(
            fmt::format("EPR state chi={} leaks {:.3g} beyond cutoff {}", chi, leak, cutoff), leak);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
    double norm = std::sqrt(1.0 - chi * chi);
    for (int n = 0; n <= cutoff; ++n)
        v[static_cast<Eigen::Index>(space.index(std::array{n, n}))] = norm * std::pow(chi, n);
    return PureState(space, std::move(v));
}

// ------------------------------------------------------------- structure

namespace {

FockSpace joined(const FockSpace& a, const FockSpace& b) {
    std::vector<int> c = a.cutoffs();
    c.insert(c.end(), b.cutoffs().begin(), b.cutoffs().end());
    if (c.empty()) return FockSpace::scalar();
    return FockSpace(std::move(c));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

PureState tensor(const PureState& a, const PureState& b) {
    Matrix k = kron(a.amplitudes(), b.amplitudes());
    return PureState(joined(a.space(), b.space()), Vector(k.col(0)));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator(joined(a.space(), b.space()), kron(a.matrix(), b.matrix()));
}

DensityOperator to_density(const PureState& psi) {
    return DensityOperator(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
    const auto& sp = rho.space();
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    for (auto m : kept) sp.check_mode(m);
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw ModeCollision("partial_trace: repeated mode");

    std::vector<std::size_t> traced;
    std::vector<int> kc, tc;
    for (std::size_t m = 0; m < sp.num_modes(); ++m) {
        if (std::binary_search(kept.begin(), kept.end(), m))
            kc.push_back(sp.cutoffs()[m]);
        else {
            traced.push_back(m);
            tc.push_back(sp.cutoffs()[m]);
        }
    }
    FockSpace ks = kc.empty() ? FockSpace::scalar() : FockSpace(kc);
    FockSpace ts = tc.empty() ? FockSpace::scalar() : FockSpace(tc);

    // full index of (kept index, traced index)
    auto full = [&](std::size_t ki, std::size_t ti) {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < kept.size(); ++j)
            idx += static_cast<std::size_t>(ks.digit(ki, j)) * sp.stride(kept[j]);
        for (std::size_t j = 0; j < traced.size(); ++j)
            idx += static_cast<std::size_t>(ts.digit(ti, j)) * sp.stride(traced[j]);
        return idx;
    };

    auto kd = static_cast<Eigen::Index>(ks.dim());
    Matrix out = Matrix::Zero(kd, kd);
    std::vector<Eigen::Index> rows(ks.dim());
    for (std::size_t t = 0; t < ts.dim(); ++t) {
        for (std::size_t k = 0; k < ks.dim(); ++k) rows[k] = static_cast<Eigen::Index>(full(k, t));
        out += rho.matrix()(rows, rows);
    }
    return DensityOperator(ks, std::move(out));
}

DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

namespace {

std::vector<Eigen::Index> embedding(const FockSpace& small, const FockSpace& large) {
    if (small.num_modes() != large.num_modes())
        throw DimensionMismatch("embed: mode counts differ");
    for (std::size_t m = 0; m < small.num_modes(); ++m)
        if (small.cutoffs()[m] > large.cutoffs()[m])
            throw DimensionMismatch("embed: target cutoff smaller than source");
    std::vector<Eigen::Index> map(small.dim());
    for (std::size_t i = 0; i < small.dim(); ++i)
        map[i] = static_cast<Eigen::Index>(large.index(small.occupation(i)));
    return map;
}

}  // namespace

PureState embed(const PureState& psi, const FockSpace& larger) {
    auto map = embedding(psi.space(), larger);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(larger.dim()));
    for (std::size_t i = 0; i < map.size(); ++i) v[map[i]] = psi[i];
    return PureState(larger, std::move(v));
}

DensityOperator embed(const DensityOperator& rho, const FockSpace& larger) {
    auto map = embedding(rho.space(), larger);
    auto d = static_cast<Eigen::Index>(larger.dim());
    Matrix m = Matrix::Zero(d, d);
    m(map, map) = rho.matrix();
    return DensityOperator(larger, std::move(m));
}

namespace {

template <class Weight>
double leakage_from_diagonal(const FockSpace& sp, Weight&& weight) {
    double leak = 0.0;
    for (std::size_t i = 0; i < sp.dim(); ++i) {
        for (std::size_t m = 0; m < sp.num_modes(); ++m)
            if (sp.digit(i, m) == sp.cutoffs()[m]) leak += weight(i);
    }
    return leak;
}

}  // namespace

double truncation_leakage(const PureState& psi) {
    return leakage_from_diagonal(psi.space(), [&](std::size_t i) { return std::norm(psi[i]); });
}

double truncation_leakage(const DensityOperator& rho) {
    return leakage_from_diagonal(rho.space(), [&](std::size_t i) {
        auto k = static_cast<Eigen::Index>(i);
        return std::max(0.0, rho.matrix()(k, k).real());
    });
}

// ---------------------------------------------------------- local maps

namespace {

// Applies op to `mode` of every column of `in`.
Matrix apply_on_columns(const FockSpace& sp, std::size_t mode, const Matrix& op, const Matrix& in) {
    const auto c_in = static_cast<Eigen::Index>(sp.cutoffs()[mode] + 1);
    if (op.cols() != c_in)
        throw DimensionMismatch(fmt::format("local operator has {} columns, mode has dimension {}",
                                            op.cols(), c_in));
    const auto inner = static_cast<Eigen::Index>(sp.stride(mode));
    const auto outer = static_cast<Eigen::Index>(sp.dim()) / (inner * c_in);
    const auto c_out = op.rows();
    Matrix out(outer * c_out * inner, in.cols());
    const Matrix opt = op.transpose();
    for (Eigen::Index col = 0; col < in.cols(); ++col) {
        for (Eigen::Index o = 0; o < outer; ++o) {
            Eigen::Map<const Matrix> x(in.col(col).data() + o * c_in * inner, inner, c_in);
            Eigen::Map<Matrix> y(out.col(col).data() + o * c_out * inner, inner, c_out);
            y.noalias() = x * opt;
        }
    }
    return out;
}

}  // namespace

PureState apply_local(const PureState& psi, std::size_t mode, const Matrix& op) {
    const auto& sp = psi.space();
    sp.check_mode(mode);
    Matrix out = apply_on_columns(sp, mode, op, psi.amplitudes());
    FockSpace ns = op.rows() == op.cols() ? sp : sp.with_cutoff(mode, static_cast<int>(op.rows()) - 1);
    return PureState(std::move(ns), Vector(out.col(0)));
}

DensityOperator apply_local(const DensityOperator& rho, std::size_t mode, const Matrix& op) {
    const auto& sp = rho.space();
    sp.check_mode(mode);
    Matrix left = apply_on_columns(sp, mode, op, rho.matrix());  // O rho
    Matrix both = apply_on_columns(sp, mode, op, left.adjoint());  // O (O rho)^dag
    FockSpace ns = op.rows() == op.cols() ? sp : sp.with_cutoff(mode, static_cast<int>(op.rows()) - 1);
    return DensityOperator(std::move(ns), both.adjoint());
}

}  // namespace scissorlab
