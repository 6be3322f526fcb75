#pragma once

#include <variant>
#include <vector>

#include "scissorlab/fock.hpp"

namespace scissorlab {

struct Beamsplitter {
    std::size_t first;
    std::size_t second;
    double transmissivity;
};

struct PhaseShift {
    std::size_t mode;
    double phase;
};

struct Loss {
    std::size_t mode;
    double transmissivity;
};

using Element = std::variant<Beamsplitter, PhaseShift, Loss>;

// Ordered linear-optical network on a fixed set of modes.
class Circuit {
public:
    explicit Circuit(FockSpace space);

    Circuit& add(const Element& e);
    Circuit& beamsplitter(std::size_t first, std::size_t second, double T);
    Circuit& phase(std::size_t mode, double theta);
    Circuit& loss(std::size_t mode, double tau);

    const FockSpace& space() const { return space_; }
    const std::vector<Element>& elements() const { return elements_; }
    std::size_t num_modes() const { return space_.num_modes(); }
    std::size_t loss_count() const;
    bool lossless() const { return loss_count() == 0; }

    // Coherent-amplitude map. Each Loss element is dilated into a beamsplitter
    // with its own vacuum environment mode; the j-th loss uses mode
    // num_modes() + j. Square of size num_modes() + loss_count().
    Matrix transfer_matrix() const;

    // Dense evolution in space(). Loss elements fan every branch out into its
    // Kraus branches, so the output is a list whose projectors sum to the
    // output density operator. Zero branches are dropped.
    std::vector<PureState> apply(const PureState& in) const;
    DensityOperator apply_mixed(const PureState& in) const;

private:
    FockSpace space_;
    std::vector<Element> elements_;
};

}  // namespace scissorlab
