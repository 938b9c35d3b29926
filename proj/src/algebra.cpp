#include "rdjc/algebra.hpp"

#include <algorithm>

namespace rdjc {
namespace {

// Max-norm of the columns [first, last] of `m`, restricted to rows in the
// same range when `square_block` is set.
IdentityResidual measure(std::string name, const Matrix<double>& m, int first, int last,
                         bool square_block, double tol) {
    double worst = 0.0;
    int worst_level = first;
    for (int col = first; col <= last; ++col) {
        const auto column = square_block ? m.col(col).segment(first, last - first + 1)
                                         : m.col(col).segment(0, m.rows());
        const double r = column.cwiseAbs().maxCoeff();
        if (r > worst) {
            worst = r;
            worst_level = col;
        }
    }
    return {std::move(name), first, last, worst, worst_level, worst <= tol};
}

}  // namespace

bool AlgebraReport::passed() const {
    return std::all_of(identities.begin(), identities.end(),
                       [](const IdentityResidual& r) { return r.passed; });
}

AlgebraReport verify_algebra(FockCutoff cutoff, DeformationParam lambda, double tolerance) {
    using M = Matrix<double>;
    const int top = cutoff.n_max();
    const M a = annihilation(cutoff, lambda);
    const M ad = creation(cutoff, lambda);
    const M r = parity(cutoff);
    const M n = number(cutoff);
    const M id = M::Identity(cutoff.dim(), cutoff.dim());
    const double lam = lambda.value();

    const M comm = commutator(a, ad) - id - 2.0 * lam * r;

    AlgebraReport report{top, lam, tolerance, {}, 0.0};
    report.identities.push_back(
        measure("{R,a} = 0", anticommutator(r, a), 0, top, false, tolerance));
    report.identities.push_back(
        measure("{R,a^dagger} = 0", anticommutator(r, ad), 0, top, false, tolerance));
    report.identities.push_back(
        measure("[a,a^dagger] = I + 2 lambda R", comm, 0, top - 1, true, tolerance));
    report.identities.push_back(
        measure("a^dagger a = N + lambda (I - R)", ad * a - n - lam * (id - r), 0, top, false,
                tolerance));
    report.identities.push_back(
        measure("[N,a] = -a", commutator(n, a) + a, 1, top, false, tolerance));
    report.boundary_commutator_residual = std::abs(comm(top, top));
    return report;
}

}  // namespace rdjc
