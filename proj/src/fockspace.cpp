#include "optocav/fockspace.hpp"

#include <cmath>
#include <sstream>

namespace optocav {

FockBasis::FockBasis(BasisSpec spec) : spec_(std::move(spec)) {
    require(!spec_.photon_cutoffs.empty(), "basis needs at least one photon mode");
    cutoffs_ = spec_.photon_cutoffs;
    cutoffs_.push_back(spec_.phonon_cutoff);
    for (int c : cutoffs_)
        require(c >= 1, "every cutoff must be >= 1, got " + std::to_string(c));

    // Capacity check before allocating anything.
    std::size_t dim = 1;
    for (int c : cutoffs_) {
        dim *= static_cast<std::size_t>(c + 1);
        if (dim > spec_.dimension_limit)
            fail(ErrorKind::capacity, "basis dimension exceeds limit " +
                                          std::to_string(spec_.dimension_limit));
    }
    dimension_ = dim;

    strides_.assign(cutoffs_.size(), 1);
    for (std::size_t m = cutoffs_.size() - 1; m-- > 0;)
        strides_[m] = strides_[m + 1] * static_cast<std::size_t>(cutoffs_[m + 1] + 1);

    states_.reserve(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) {
        Occupation occ(cutoffs_.size());
        std::size_t rest = i;
        for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
            occ[m] = static_cast<int>(rest / strides_[m]);
            rest %= strides_[m];
        }
        states_.push_back(std::move(occ));
    }
}

ModeId FockBasis::photon(std::size_t i) const {
    require(i < photon_mode_count(), "photon mode " + std::to_string(i) + " out of range");
    return ModeId{i};
}

int FockBasis::cutoff(ModeId mode) const {
    require(mode.index < cutoffs_.size(), "mode id out of range");
    return cutoffs_[mode.index];
}

Occupation FockBasis::state(std::size_t index) const {
    require(index < dimension_, "state index out of range");
    return states_[index];
}

std::optional<std::size_t> FockBasis::find(const Occupation& occupation) const {
    if (occupation.size() != cutoffs_.size())
        return std::nullopt;
    std::size_t index = 0;
    for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
        if (occupation[m] < 0 || occupation[m] > cutoffs_[m])
            return std::nullopt;
        index += static_cast<std::size_t>(occupation[m]) * strides_[m];
    }
    return index;
}

std::size_t FockBasis::index_of(const Occupation& occupation) const {
    if (auto index = find(occupation))
        return *index;
    fail(ErrorKind::validation, "occupation " + label(occupation) + " not in basis");
}

bool FockBasis::interior(std::size_t index) const {
    const auto& occ = states_[index];
    for (std::size_t m = 0; m < cutoffs_.size(); ++m)
        if (occ[m] >= cutoffs_[m])
            return false;
    return true;
}

void add_monomial(RealOperator& target, double coefficient, const std::vector<LadderStep>& steps) {
    const FockBasis& basis = *target.basis;
    for (const auto& step : steps)
        check_mode(basis, step.mode);
    for (std::size_t col = 0; col < basis.dimension(); ++col) {
        Occupation occ = basis.states()[col];
        double amplitude = coefficient;
        bool alive = true;
        for (auto it = steps.rbegin(); it != steps.rend() && alive; ++it) {
            int& n = occ[it->mode.index];
            if (it->kind == Ladder::lowering) {
                alive = n > 0;
                amplitude *= std::sqrt(static_cast<double>(n));
                --n;
            } else {
                alive = n < basis.cutoff(it->mode);
                ++n;
                amplitude *= std::sqrt(static_cast<double>(n));
            }
        }
        if (!alive)
            continue;
        const auto row = basis.index_of(occ);
        target.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += amplitude;
    }
}

BasisPtr build_basis(const BasisSpec& spec) {
    return std::make_shared<const FockBasis>(spec);
}

std::string label(const Occupation& occupation) {
    std::ostringstream os;
    os << '|';
    for (std::size_t i = 0; i < occupation.size(); ++i)
        os << (i ? "," : "") << occupation[i];
    os << '>';
    return os.str();
}

} // namespace optocav
