#include "scissorlab/device.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace scissorlab {

// ------------------------------------------------------------ ScissorSpec

ScissorSpec ScissorSpec::from_transmissivity(int order, double eta) {
    ScissorSpec s;
    s.order = order;
    s.gain = gain_from_transmissivity(eta);
    return s;
}

int ScissorSpec::resources() const { return resource_photons < 0 ? order : resource_photons; }

void ScissorSpec::validate() const {
    if (order != 1 && order != 2 && order != 3 && order != 7)
        throw UnsupportedOrder(fmt::format("no scissor of order {}", order));
    if (!(gain > 0.0) || !std::isfinite(gain))
        throw ParameterOutOfRange(fmt::format("gain {} must be positive", gain));
    if (resources() > device_order())
        throw ParameterOutOfRange(fmt::format("{} resource photons exceed order {}", resources(),
                                              device_order()));
    if (!(resource_efficiency >= 0.0 && resource_efficiency <= 1.0))
        throw ParameterOutOfRange(
            fmt::format("resource efficiency {} outside [0, 1]", resource_efficiency));
    detector.validate();
}

// ---------------------------------------------------------------- builder

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> dense_cutoffs(std::size_t modes, std::size_t resource, int input_cutoff, int m) {
    std::vector<int> c(modes, input_cutoff + m);
    c[resource] = std::max(m, 1);
    return c;
}

// Every pattern with a single empty port; the remaining ports see one photon.
std::vector<ClickPattern> single_vacancy_patterns(std::size_t ports) {
    std::vector<ClickPattern> out;
    for (std::size_t j = 0; j < ports; ++j) {
        ClickPattern p(ports, 1);
        p[j] = 0;
        out.push_back(p);
    }
    return out;
}

}  // namespace

ScissorCircuit build_scissor_network(int order, double t_a, double t_b, int m, double tau_s,
                                     int input_cutoff) {
    if (input_cutoff < 1) throw ParameterOutOfRange("input cutoff must be >= 1");
    if (m < 0) throw ParameterOutOfRange("negative resource photon number");
    const std::size_t A = 0, B = 1, C = 2;
    ScissorCircuit d{Circuit(FockSpace::scalar()), order, A, B, B, {}, m, {}};

    if (order == 1) {
        Circuit c(FockSpace(dense_cutoffs(3, B, input_cutoff, m)));
        if (tau_s < 1.0) c.loss(B, tau_s);
        c.beamsplitter(B, C, t_b).beamsplitter(A, C, t_a);
        d.circuit = std::move(c);
        d.detected_modes = {A, C};
        d.patterns = {{{0, 1}, 0.0}, {{1, 0}, kPi}};
    } else if (order == 3) {
        const std::size_t Ap = 3, Cp = 4;
        Circuit c(FockSpace(dense_cutoffs(5, B, input_cutoff, m)));
        if (tau_s < 1.0) c.loss(B, tau_s);
        c.beamsplitter(B, C, t_b)
            .beamsplitter(A, C, t_a)
            .beamsplitter(A, Ap, 0.5)
            .beamsplitter(C, Cp, 0.5)
            .phase(Ap, kPi / 2)
            .beamsplitter(Ap, Cp, 0.5);
        d.circuit = std::move(c);
        d.detected_modes = {A, Ap, C, Cp};
        d.patterns = {{{0, 1, 1, 1}, 0.0},
                      {{1, 0, 1, 1}, kPi / 2},
                      {{1, 1, 0, 1}, kPi},
                      {{1, 1, 1, 0}, 3 * kPi / 2}};
    } else if (order == 7) {
        if (t_a != 0.5) throw ParameterOutOfRange("order-7 network uses balanced input splitting");
        // Split A and C four ways, twist the C copies by multiples of pi/4,
        // and recombine pairwise: port pairs carry gamma -+ e^{i phi} x.
        const std::size_t A2 = 3, A3 = 4, A4 = 5, C2 = 6, C3 = 7, C4 = 8;
        Circuit c(FockSpace(dense_cutoffs(9, B, input_cutoff, m)));
        if (tau_s < 1.0) c.loss(B, tau_s);
        c.beamsplitter(B, C, t_b);
        c.beamsplitter(A, A2, 0.5).beamsplitter(A, A3, 0.5).beamsplitter(A2, A4, 0.5);
        c.beamsplitter(C, C2, 0.5).beamsplitter(C, C3, 0.5).beamsplitter(C2, C4, 0.5);
        const std::size_t as[4] = {A, A2, A3, A4}, cs[4] = {C, C2, C3, C4};
        for (int j = 0; j < 4; ++j) {
            if (j > 0) c.phase(cs[j], j * kPi / 4);
            c.beamsplitter(as[j], cs[j], 0.5);
        }
        d.circuit = std::move(c);
        d.detected_modes = {A, C, A2, C2, A3, C3, A4, C4};
        for (auto& p : single_vacancy_patterns(8)) d.patterns.push_back({p, 0.0});
        // Heralded phases follow from the circuit: read them off the
        // |0>,|1> components of a probe input.
        if (m == 7 && tau_s == 1.0) {
            FockSpace probe_space({1});
            Vector v(2);
            v << 1.0, 1.0;
            PureState probe(probe_space, v / std::sqrt(2.0));
            for (auto& p : d.patterns) {
                PureState out = herald_pattern(d, probe, p.clicks);
                p.heralded_phase = std::arg(out[1] / out[0]);
                if (p.heralded_phase < 0) p.heralded_phase += 2 * kPi;
            }
        } else {
            auto ideal = build_scissor_network(7, t_a, t_b, 7, 1.0, 1);
            d.patterns = ideal.patterns;
        }
    } else {
        throw UnsupportedOrder(fmt::format("no scissor network of order {}", order));
    }
    return d;
}

ScissorCircuit build_scissor_circuit(const ScissorSpec& spec, int input_cutoff) {
    spec.validate();
    return build_scissor_network(spec.device_order(), 0.5, spec.transmissivity(), spec.resources(),
                                 spec.resource_efficiency, input_cutoff);
}

// ---------------------------------------------------------- expansion

std::uint64_t OccupationKey::encode(std::span<const int> occ) {
    if (occ.size() > static_cast<std::size_t>(kMaxModes))
        throw ParameterOutOfRange(fmt::format("{} modes exceed the packed limit", occ.size()));
    std::uint64_t key = 0;
    for (std::size_t m = 0; m < occ.size(); ++m) {
        if (occ[m] < 0 || occ[m] > kMaxPhotons)
            throw OccupationOutOfRange(fmt::format("occupation {} exceeds packed limit", occ[m]));
        key = set(key, m, occ[m]);
    }
    return key;
}

namespace {

void check_propagate(const Matrix& U, std::span<const int> input, std::span<const int> max_out,
                     int extra) {
    const auto M = static_cast<std::size_t>(U.rows());
    if (U.cols() != U.rows() || input.size() != M || max_out.size() != M)
        throw DimensionMismatch("propagate: transfer matrix and occupation sizes disagree");
    if (M > static_cast<std::size_t>(OccupationKey::kMaxModes))
        throw ParameterOutOfRange(fmt::format("{} modes exceed the packed limit", M));
    int total = extra;
    for (int n : input) total += n;
    if (total > OccupationKey::kMaxPhotons)
        throw ParameterOutOfRange(fmt::format("{} photons exceed the packed limit", total));
}

// One more photon created in input mode i.
SparseState add_photon(const SparseState& state, const Matrix& U, std::size_t i,
                       std::span<const int> max_out) {
    const auto M = static_cast<std::size_t>(U.rows());
    SparseState next;
    next.reserve(state.size() * 2);
    for (const auto& [key, amp] : state) {
        for (std::size_t j = 0; j < M; ++j) {
            Complex u = U(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            if (u == Complex(0.0)) continue;
            int nj = OccupationKey::get(key, j) + 1;
            if (nj > std::min(max_out[j], OccupationKey::kMaxPhotons)) continue;
            next[OccupationKey::set(key, j, nj)] += amp * u;
        }
    }
    return next;
}

SparseState normalize_terms(SparseState state, double log_norm_in, std::size_t M) {
    for (auto& [key, amp] : state) {
        double log_norm_out = 0.0;
        for (std::size_t j = 0; j < M; ++j) log_norm_out += log_factorial(OccupationKey::get(key, j));
        amp *= std::exp(0.5 * (log_norm_out - log_norm_in));
    }
    return state;
}

// propagate() for input + n photons on `mode`, n = 0..n_max, sharing the work.
std::vector<SparseState> propagate_ladder(const Matrix& U, std::span<const int> input, std::size_t mode,
                                          int n_max, std::span<const int> max_out) {
    check_propagate(U, input, max_out, n_max);
    const auto M = static_cast<std::size_t>(U.rows());
    SparseState state{{0, Complex(1.0)}};
    double log_norm_in = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        log_norm_in += log_factorial(input[i]);
        for (int rep = 0; rep < input[i]; ++rep) state = add_photon(state, U, i, max_out);
    }
    std::vector<SparseState> out;
    for (int n = 0;; ++n) {
        out.push_back(normalize_terms(state, log_norm_in + log_factorial(input[mode] + n) -
                                                 log_factorial(input[mode]),
                                      M));
        if (n == n_max) break;
        state = add_photon(state, U, mode, max_out);
    }
    return out;
}

}  // namespace

SparseState propagate(const Matrix& U, std::span<const int> input, std::span<const int> max_out) {
    check_propagate(U, input, max_out, 0);
    const auto M = static_cast<std::size_t>(U.rows());
    SparseState state{{0, Complex(1.0)}};
    double log_norm_in = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        log_norm_in += log_factorial(input[i]);
        for (int rep = 0; rep < input[i]; ++rep) state = add_photon(state, U, i, max_out);
    }
    return normalize_terms(std::move(state), log_norm_in, M);
}

// ---------------------------------------------------------- heralding map

namespace {

// Reduce a Kraus family to at most (rows * cols) operators via its Choi matrix.
std::vector<Matrix> compress(std::vector<Matrix> ops) {
    if (ops.empty()) return ops;
    const auto r = ops.front().rows(), c = ops.front().cols();
    const auto d = r * c;
    if (static_cast<Eigen::Index>(ops.size()) <= d) return ops;
    // photon conservation leaves each operator with few nonzeros
    Matrix J = Matrix::Zero(d, d);
    std::vector<std::pair<Eigen::Index, Complex>> nz;
    for (const auto& K : ops) {
        nz.clear();
        for (Eigen::Index i = 0; i < d; ++i)
            if (K.data()[i] != Complex(0.0)) nz.emplace_back(i, K.data()[i]);
        for (const auto& [i, a] : nz)
            for (const auto& [j, b] : nz) J(i, j) += a * std::conj(b);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(J);
    double top = es.eigenvalues().maxCoeff();
    std::vector<Matrix> out;
    for (Eigen::Index k = d - 1; k >= 0; --k) {
        double lam = es.eigenvalues()[k];
        if (!(lam > 1e-15 * top)) break;
        Vector v = es.eigenvectors().col(k) * std::sqrt(lam);
        out.push_back(Eigen::Map<Matrix>(v.data(), r, c));
    }
    return out;
}

}  // namespace

std::size_t HeraldingMap::size() const {
    std::size_t n = 0;
    for (const auto& f : kraus) n += f.size();
    return n;
}

DensityOperator HeraldingMap::apply(const DensityOperator& rho, std::size_t mode) const {
    if (rho.space().cutoff(mode) != input_cutoff)
        throw DimensionMismatch(fmt::format("device expects input cutoff {}, state has {}",
                                            input_cutoff, rho.space().cutoff(mode)));
    auto out = DensityOperator::zero(rho.space().with_cutoff(mode, output_cutoff));
    for (const auto& family : kraus)
        for (const auto& K : family) out.add(apply_local(rho, mode, K));
    return out;
}

DensityOperator HeraldingMap::apply(const PureState& psi, std::size_t mode) const {
    if (psi.space().cutoff(mode) != input_cutoff)
        throw DimensionMismatch(fmt::format("device expects input cutoff {}, state has {}",
                                            input_cutoff, psi.space().cutoff(mode)));
    auto out = DensityOperator::zero(psi.space().with_cutoff(mode, output_cutoff));
    for (const auto& family : kraus)
        for (const auto& K : family) out.add_projector(apply_local(psi, mode, K));
    return out;
}

std::vector<double> HeraldingMap::pattern_probabilities(const PureState& psi, std::size_t mode) const {
    std::vector<double> p;
    for (const auto& family : kraus) {
        double s = 0.0;
        for (const auto& K : family) s += apply_local(psi, mode, K).norm_sq();
        p.push_back(s);
    }
    return p;
}

HeraldingMap heralding_map(const ScissorCircuit& device, const DetectorModel& detector,
                           int input_cutoff) {
    return heralding_map(device, detector, input_cutoff, device.patterns);
}

HeraldingMap heralding_map(const ScissorCircuit& device, const DetectorModel& detector,
                           int input_cutoff, std::span<const AcceptedPattern> patterns) {
    detector.validate();
    if (input_cutoff < 1) throw ParameterOutOfRange("input cutoff must be >= 1");
    if (patterns.size() > 15) throw ParameterOutOfRange("too many accepted patterns");
    const Circuit& circ = device.circuit;
    const Matrix U = circ.transfer_matrix();
    const auto M = static_cast<std::size_t>(U.rows());
    const auto& det = device.detected_modes;
    for (const auto& p : patterns)
        if (p.clicks.size() != det.size())
            throw DimensionMismatch("click pattern length differs from detected port count");

    HeraldingMap map;
    map.input_cutoff = input_cutoff;
    map.output_cutoff = std::max(device.resource_photons, 1);

    std::vector<int> max_out(M, OccupationKey::kMaxPhotons);
    max_out[device.output_mode] = map.output_cutoff;
    for (std::size_t j = 0; j < det.size(); ++j) {
        if (detector.perfect_pnr()) {
            int b = 0;
            for (const auto& p : patterns) b = std::max(b, p.clicks[j]);
            max_out[det[j]] = b;
        } else if (detector.kind == DetectorKind::OnOff && detector.efficiency == 1.0) {
            bool all_off = std::all_of(patterns.begin(), patterns.end(),
                                       [&](const auto& p) { return p.clicks[j] == 0; });
            if (all_off) max_out[det[j]] = 0;
        }
    }

    const int out_dim = map.output_cutoff + 1, in_dim = input_cutoff + 1;
    // (pattern, unobserved occupations) -> Kraus operator
    std::unordered_map<std::uint64_t, Matrix> groups;
    std::vector<std::uint64_t> order;  // first-seen order keeps results deterministic
    std::vector<int> occ(M, 0);
    occ[device.resource_mode] = device.resource_photons;
    const auto ladder = propagate_ladder(U, occ, device.input_mode, input_cutoff, max_out);
    for (int n = 0; n <= input_cutoff; ++n) {
        const SparseState& out = ladder[static_cast<std::size_t>(n)];
        std::vector<std::pair<std::uint64_t, Complex>> terms(out.begin(), out.end());
        std::sort(terms.begin(), terms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [key, amp] : terms) {
            int k = OccupationKey::get(key, device.output_mode);
            std::uint64_t rest = OccupationKey::set(key, device.output_mode, 0);
            for (std::size_t p = 0; p < patterns.size(); ++p) {
                double w = 1.0;
                for (std::size_t j = 0; j < det.size() && w > 0.0; ++j)
                    w *= detector.weight(OccupationKey::get(key, det[j]), patterns[p].clicks[j]);
                if (w == 0.0) continue;
                std::uint64_t gk = rest | (static_cast<std::uint64_t>(p) << 60);
                auto [it, fresh] = groups.try_emplace(gk);
                if (fresh) {
                    it->second = Matrix::Zero(out_dim, in_dim);
                    order.push_back(gk);
                }
                it->second(k, n) +=
                    std::sqrt(w) * amp * std::polar(1.0, -patterns[p].heralded_phase * k);
            }
        }
    }

    std::vector<std::vector<Matrix>> fams(patterns.size());
    for (auto gk : order) fams[gk >> 60].push_back(std::move(groups[gk]));
    for (auto& f : fams) map.kraus.push_back(compress(std::move(f)));
    return map;
}

// ------------------------------------------------------------- run

namespace {

HeraldResult finish(DensityOperator rho, std::vector<double> pattern_p) {
    double p = rho.trace();
    if (!(p >= 1e-300)) throw ZeroProbability(fmt::format("heralding probability {:.3g}", p));
    DensityOperator normed = rho.normalized();
    HeraldResult r{normed, p, std::move(pattern_p), std::nullopt};
    Eigen::SelfAdjointEigenSolver<Matrix> es(normed.matrix());
    auto top = es.eigenvalues().size() - 1;
    if (es.eigenvalues()[top] > 1.0 - 1e-12)
        r.pure = canonical_phase(PureState(normed.space(), es.eigenvectors().col(top)));
    return r;
}

void check_single_mode(const PureState& input) {
    if (input.space().num_modes() != 1)
        throw DimensionMismatch(fmt::format("device input must be single-mode, got {} modes",
                                            input.space().num_modes()));
}

}  // namespace

HeraldResult run_heralded(const ScissorCircuit& device, const PureState& input,
                          const DetectorModel& detector) {
    return run_heralded(device, input, device.patterns, detector);
}

HeraldResult run_heralded(const ScissorCircuit& device, const PureState& input,
                          std::span<const AcceptedPattern> patterns, const DetectorModel& detector) {
    check_single_mode(input);
    auto map = heralding_map(device, detector, input.space().cutoff(0), patterns);
    return finish(map.apply(input, 0), map.pattern_probabilities(input, 0));
}

HeraldResult simulate_dense(const ScissorCircuit& device, const PureState& input,
                            const DetectorModel& detector) {
    return simulate_dense(device, input, device.patterns, detector);
}

HeraldResult simulate_dense(const ScissorCircuit& device, const PureState& input,
                            std::span<const AcceptedPattern> patterns, const DetectorModel& detector) {
    check_single_mode(input);
    const FockSpace& sp = device.circuit.space();
    if (sp.dim() > 20'000'000)
        throw ParameterOutOfRange(fmt::format("dense space of dimension {} is too large", sp.dim()));
    int c = input.space().cutoff(0);
    if (c + device.resource_photons > sp.cutoff(device.input_mode))
        throw DimensionMismatch("input cutoff exceeds what the dense network was sized for");

    Vector v = Vector::Zero(static_cast<Eigen::Index>(sp.dim()));
    Occupation occ(sp.num_modes(), 0);
    occ[device.resource_mode] = device.resource_photons;
    for (int n = 0; n <= c; ++n) {
        occ[device.input_mode] = n;
        v[static_cast<Eigen::Index>(sp.index(occ))] = input[static_cast<std::size_t>(n)];
    }
    auto branches = device.circuit.apply(PureState(sp, std::move(v)));

    std::optional<DensityOperator> total;
    std::vector<double> pattern_p;
    for (const auto& pat : patterns) {
        std::optional<DensityOperator> acc;
        for (const auto& b : branches) {
            auto h = detect(b, device.detected_modes, pat.clicks, detector);
            if (acc) acc->add(h.state);
            else acc = std::move(h.state);
        }
        int oc = acc->space().cutoff(0);
        Matrix fix = Matrix::Zero(oc + 1, oc + 1);
        for (int k = 0; k <= oc; ++k) fix(k, k) = std::polar(1.0, -pat.heralded_phase * k);
        DensityOperator corrected = apply_local(*acc, 0, fix);
        pattern_p.push_back(corrected.trace());
        if (total) total->add(corrected);
        else total = std::move(corrected);
    }
    return finish(std::move(*total), std::move(pattern_p));
}

PureState herald_pattern(const ScissorCircuit& device, const PureState& input,
                         const ClickPattern& pattern) {
    check_single_mode(input);
    if (!device.circuit.lossless())
        throw ParameterOutOfRange("herald_pattern needs a lossless device");
    AcceptedPattern p{pattern, 0.0};
    auto map = heralding_map(device, DetectorModel::pnr(), input.space().cutoff(0),
                             std::span<const AcceptedPattern>(&p, 1));
    const auto& fam = map.kraus.front();
    if (fam.empty()) return PureState::zero(FockSpace({map.output_cutoff}));
    return PureState(FockSpace({map.output_cutoff}), fam.front() * input.amplitudes());
}

}  // namespace scissorlab
