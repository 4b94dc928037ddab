#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optocav/error.hpp"

namespace optocav {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using complex = std::complex<double>;

/// Occupation numbers: photon modes first, phonon last.
using Occupation = std::vector<int>;

struct BasisSpec {
    std::vector<int> photon_cutoffs{30};
    int phonon_cutoff = 30;
    std::size_t dimension_limit = 20000;

    static BasisSpec single_mode(int photon_cutoff, int phonon_cutoff) {
        return BasisSpec{{photon_cutoff}, phonon_cutoff};
    }
};

enum class Ladder { lowering, raising };
enum class Parity { even, odd };

/// Index of an oscillator inside a basis: photon modes 0..n-1, phonon n.
struct ModeId {
    std::size_t index;
};

/// Truncated product Fock basis in lexicographic order (last mode fastest).
class FockBasis {
public:
    explicit FockBasis(BasisSpec spec);

    const BasisSpec& spec() const { return spec_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t mode_count() const { return cutoffs_.size(); }
    std::size_t photon_mode_count() const { return spec_.photon_cutoffs.size(); }

    ModeId photon(std::size_t i = 0) const;
    ModeId phonon() const { return ModeId{cutoffs_.size() - 1}; }
    int cutoff(ModeId mode) const;

    Occupation state(std::size_t index) const;
    const std::vector<Occupation>& states() const { return states_; }
    std::optional<std::size_t> find(const Occupation& occupation) const;
    /// Throws on occupations outside the truncation.
    std::size_t index_of(const Occupation& occupation) const;

    int occupation(std::size_t index, ModeId mode) const {
        return states_[index][mode.index];
    }
    /// True when no mode sits at its cutoff; commutators are exact there.
    bool interior(std::size_t index) const;

private:
    BasisSpec spec_;
    std::vector<int> cutoffs_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_ = 0;
    std::vector<Occupation> states_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr build_basis(const BasisSpec& spec);

std::string label(const Occupation& occupation);

/// Dense operator bound to the basis it acts on.
template <typename Scalar>
struct OperatorMatrix {
    BasisPtr basis;
    Matrix<Scalar> entries;

    std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }

    template <typename Other>
    OperatorMatrix<Other> cast() const {
        return {basis, entries.template cast<Other>()};
    }
};

using RealOperator = OperatorMatrix<double>;
using ComplexOperator = OperatorMatrix<complex>;

template <typename Scalar>
OperatorMatrix<Scalar> zero_operator(const BasisPtr& basis) {
    const auto n = static_cast<Eigen::Index>(basis->dimension());
    return {basis, Matrix<Scalar>::Zero(n, n)};
}

template <typename Scalar>
OperatorMatrix<Scalar> identity_operator(const BasisPtr& basis) {
    const auto n = static_cast<Eigen::Index>(basis->dimension());
    return {basis, Matrix<Scalar>::Identity(n, n)};
}

inline void check_mode(const FockBasis& basis, ModeId mode) {
    require(mode.index < basis.mode_count(),
            "mode id " + std::to_string(mode.index) + " out of range");
}

/// <m|a|n> = sqrt(n) delta_{m,n-1}; raising is the transpose.
template <typename Scalar = double>
OperatorMatrix<Scalar> ladder_matrix(const BasisPtr& basis, ModeId mode, Ladder kind) {
    check_mode(*basis, mode);
    auto op = zero_operator<Scalar>(basis);
    for (std::size_t col = 0; col < basis->dimension(); ++col) {
        Occupation lowered = basis->state(col);
        const int n = lowered[mode.index];
        if (n == 0)
            continue;
        lowered[mode.index] = n - 1;
        const auto row = basis->index_of(lowered);
        op.entries(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            Scalar(std::sqrt(static_cast<double>(n)));
    }
    if (kind == Ladder::raising)
        op.entries = op.entries.adjoint().eval();
    return op;
}

template <typename Scalar = double>
OperatorMatrix<Scalar> number_operator(const BasisPtr& basis, ModeId mode) {
    check_mode(*basis, mode);
    auto op = zero_operator<Scalar>(basis);
    for (std::size_t i = 0; i < basis->dimension(); ++i)
        op.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            Scalar(basis->occupation(i, mode));
    return op;
}

/// Total photon number summed over all photon modes.
template <typename Scalar = double>
OperatorMatrix<Scalar> photon_number_operator(const BasisPtr& basis) {
    auto op = zero_operator<Scalar>(basis);
    for (std::size_t m = 0; m < basis->photon_mode_count(); ++m)
        op.entries += number_operator<Scalar>(basis, basis->photon(m)).entries;
    return op;
}

template <typename Scalar = double>
OperatorMatrix<Scalar> number_parity_projector(const BasisPtr& basis, ModeId mode, Parity parity) {
    check_mode(*basis, mode);
    auto op = zero_operator<Scalar>(basis);
    const int want = parity == Parity::even ? 0 : 1;
    for (std::size_t i = 0; i < basis->dimension(); ++i)
        if (basis->occupation(i, mode) % 2 == want)
            op.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = Scalar(1);
    return op;
}

/// Projector on states with the given parity of the total photon number.
template <typename Scalar = double>
OperatorMatrix<Scalar> photon_parity_projector(const BasisPtr& basis, Parity parity) {
    auto op = zero_operator<Scalar>(basis);
    const int want = parity == Parity::even ? 0 : 1;
    for (std::size_t i = 0; i < basis->dimension(); ++i) {
        int total = 0;
        for (std::size_t m = 0; m < basis->photon_mode_count(); ++m)
            total += basis->occupation(i, basis->photon(m));
        if (total % 2 == want)
            op.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = Scalar(1);
    }
    return op;
}

template <typename Scalar>
Matrix<Scalar> commutator(const OperatorMatrix<Scalar>& a, const OperatorMatrix<Scalar>& b) {
    return a.entries * b.entries - b.entries * a.entries;
}

/// Restriction of a matrix to rows/cols of interior states.
template <typename Derived>
auto interior_block(const FockBasis& basis, const Eigen::MatrixBase<Derived>& m) {
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        if (basis.interior(i))
            keep.push_back(static_cast<Eigen::Index>(i));
    Matrix<typename Derived::Scalar> out(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(keep[r], keep[c]);
    return out;
}

/// max |H - H^dagger| relative to max |H|; zero for the zero matrix.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tolerance = 1e-12) {
    return m.rows() == m.cols() && hermiticity_defect(m) < tolerance;
}

/// One ladder operator inside a product.
struct LadderStep {
    ModeId mode;
    Ladder kind;
};

/// target += coefficient * steps[0] steps[1] ... (rightmost acts first).
/// Any intermediate occupation outside the truncation annihilates the term,
/// which is what the product of truncated ladder matrices does.
void add_monomial(RealOperator& target, double coefficient, const std::vector<LadderStep>& steps);

template <typename Scalar>
Vector<Scalar> basis_vector(const FockBasis& basis, const Occupation& occupation) {
    Vector<Scalar> v = Vector<Scalar>::Zero(static_cast<Eigen::Index>(basis.dimension()));
    v(static_cast<Eigen::Index>(basis.index_of(occupation))) = Scalar(1);
    return v;
}

} // namespace optocav
