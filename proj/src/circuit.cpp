#include "scissorlab/circuit.hpp"

#include <cmath>

#include <fmt/format.h>

#include "scissorlab/channels.hpp"
#include "scissorlab/linear_optics.hpp"

namespace scissorlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw ParameterOutOfRange(fmt::format("{} {} outside [0, 1]", what, x));
}

}  // namespace

Circuit::Circuit(FockSpace space) : space_(std::move(space)) {}

Circuit& Circuit::add(const Element& e) {
    std::visit(overloaded{
                   [&](const Beamsplitter& b) {
                       space_.check_mode(b.first);
                       space_.check_mode(b.second);
                       if (b.first == b.second)
                           throw ModeCollision(fmt::format("beamsplitter on mode {} twice", b.first));
                       check_unit(b.transmissivity, "beamsplitter transmissivity");
                   },
                   [&](const PhaseShift& p) {
                       space_.check_mode(p.mode);
                       if (!std::isfinite(p.phase)) throw ParameterOutOfRange("non-finite phase");
                   },
                   [&](const Loss& l) {
                       space_.check_mode(l.mode);
                       check_unit(l.transmissivity, "loss transmissivity");
                   },
               },
               e);
    elements_.push_back(e);
    return *this;
}

Circuit& Circuit::beamsplitter(std::size_t first, std::size_t second, double T) {
    return add(Beamsplitter{first, second, T});
}
Circuit& Circuit::phase(std::size_t mode, double theta) { return add(PhaseShift{mode, theta}); }
Circuit& Circuit::loss(std::size_t mode, double tau) { return add(Loss{mode, tau}); }

std::size_t Circuit::loss_count() const {
    std::size_t n = 0;
    for (const auto& e : elements_) n += std::holds_alternative<Loss>(e) ? 1 : 0;
    return n;
}

Matrix Circuit::transfer_matrix() const {
    const auto M = static_cast<Eigen::Index>(num_modes() + loss_count());
    Matrix u = Matrix::Identity(M, M);
    auto mix = [&](Eigen::Index a, Eigen::Index b, double T) {
        Eigen::Matrix2d g = beamsplitter_mixing(T);
        Eigen::RowVectorXcd ra = u.row(a), rb = u.row(b);
        u.row(a) = g(0, 0) * ra + g(0, 1) * rb;
        u.row(b) = g(1, 0) * ra + g(1, 1) * rb;
    };
    auto env = static_cast<Eigen::Index>(num_modes());
    for (const auto& e : elements_) {
        std::visit(overloaded{
                       [&](const Beamsplitter& b) {
                           mix(static_cast<Eigen::Index>(b.first),
                               static_cast<Eigen::Index>(b.second), b.transmissivity);
                       },
                       [&](const PhaseShift& p) {
                           u.row(static_cast<Eigen::Index>(p.mode)) *= std::polar(1.0, p.phase);
                       },
                       [&](const Loss& l) {
                           mix(static_cast<Eigen::Index>(l.mode), env++, l.transmissivity);
                       },
                   },
                   e);
    }
    return u;
}

std::vector<PureState> Circuit::apply(const PureState& in) const {
    if (!(in.space() == space_)) throw DimensionMismatch("circuit input lives in a different space");
    std::vector<PureState> branches{in};
    for (const auto& e : elements_) {
        std::vector<PureState> next;
        for (const auto& psi : branches) {
            std::visit(overloaded{
                           [&](const Beamsplitter& b) {
                               next.push_back(
                                   apply_beamsplitter(psi, b.first, b.second, b.transmissivity));
                           },
                           [&](const PhaseShift& p) {
                               next.push_back(apply_phase(psi, p.mode, p.phase));
                           },
                           [&](const Loss& l) {
                               for (auto& k :
                                    loss_on_kraus_branches(psi, l.mode, l.transmissivity).branches)
                                   if (k.norm_sq() > 0.0) next.push_back(std::move(k));
                           },
                       },
                       e);
        }
        branches = std::move(next);
    }
    return branches;
}

DensityOperator Circuit::apply_mixed(const PureState& in) const {
    auto rho = DensityOperator::zero(space_);
    for (const auto& b : apply(in)) rho.add_projector(b);
    return rho;
}

}  // namespace scissorlab
