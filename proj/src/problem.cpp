#include "fls/problem.hpp"

#include "fls/factorization.hpp"

#include <cmath>
#include <sstream>

namespace fls {

FactorizedProblem::FactorizedProblem(DenseMatrix A, DenseMatrix B, Vector b, std::optional<Vector> x_star,
                                     bool consistent, ProblemMeta meta)
    : A_(std::move(A)), B_(std::move(B)), b_(std::move(b)), x_star_(std::move(x_star)),
      consistent_(consistent), meta_(std::move(meta)) {
    require_same_size(A_.cols(), B_.rows(), "FactorizedProblem: A columns vs B rows");
    require_same_size(b_.size(), A_.rows(), "FactorizedProblem: b length vs A rows");
    if (A_.rows() < A_.cols() || B_.cols() < B_.rows())
        throw DimensionError("FactorizedProblem: need m >= l and n >= l");
    if (x_star_) require_same_size(x_star_->size(), B_.cols(), "FactorizedProblem: x* length vs B columns");

    // rank(A) = rank(B) = l
    try {
        HouseholderQr qa(A_);
        HouseholderQr qb(B_.transposed());
    } catch (const RankDeficientError& e) {
        throw RankDeficientError(std::string("FactorizedProblem: rank(A) = rank(B) = l violated: ") + e.what());
    }

    if (x_star_) {
        const Vector abx = matvec(A_, matvec(B_, *x_star_));
        const Vector resid = subtract(b_, abx);
        const double bnorm = norm2(b_);
        if (consistent_) {
            if (norm2(resid) > 1e-10 * bnorm)
                throw std::invalid_argument("FactorizedProblem: flagged consistent but ||A B x* - b|| = " +
                                            std::to_string(norm2(resid)));
        } else {
            const double normal = norm2(matvec_transposed(B_, matvec_transposed(A_, resid)));
            const double scale = std::sqrt(A_.frobenius_sq() * B_.frobenius_sq()) * bnorm;
            if (normal > 1e-8 * scale)
                throw std::invalid_argument("FactorizedProblem: flagged inconsistent but x* is not a "
                                            "least-squares solution (normal residual " +
                                            std::to_string(normal) + ")");
        }
    }
}

const DenseMatrix& FactorizedProblem::ensure_full_matrix() {
    if (!C_) C_ = multiply(A_, B_);
    return *C_;
}

std::string FactorizedProblem::describe() const {
    std::ostringstream os;
    os << meta_.source << " m=" << m() << " l=" << l() << " n=" << n()
       << (consistent_ ? " consistent" : " inconsistent");
    if (meta_.sparsity) os << " s=" << meta_.sparsity;
    if (meta_.seed) os << " seed=" << *meta_.seed;
    return os.str();
}

} // namespace fls
