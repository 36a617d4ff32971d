#include "wflow/linear_solver.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace wflow {

RealifiedSystem realify(const ConjugateBlockSystem& sys) {
    const int n = static_cast<int>(sys.r.size());
    if (sys.A.rows() != n || sys.A.cols() != n || sys.B.size() != n)
        throw DimensionError("realify: inconsistent block sizes");

    // dV = x + jy:  [[Re A + Re B, Im B - Im A], [Im A + Im B, Re A - Re B]] [x; y] = [Re r; Im r]
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * sys.A.nonZeros() + 4 * n);
    for (int col = 0; col < sys.A.outerSize(); ++col) {
        for (SparseComplexMatrix::InnerIterator it(sys.A, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            const double re = it.value().real();
            const double im = it.value().imag();
            trip.emplace_back(r, c, re);
            trip.emplace_back(r, n + c, -im);
            trip.emplace_back(n + r, c, im);
            trip.emplace_back(n + r, n + c, re);
        }
    }
    for (int k = 0; k < n; ++k) {
        const double re = sys.B[k].real();
        const double im = sys.B[k].imag();
        trip.emplace_back(k, k, re);
        trip.emplace_back(k, n + k, im);
        trip.emplace_back(n + k, k, im);
        trip.emplace_back(n + k, n + k, -re);
    }

    RealifiedSystem out;
    out.M.resize(2 * n, 2 * n);
    out.M.setFromTriplets(trip.begin(), trip.end());
    out.M.makeCompressed();
    out.b.resize(2 * n);
    out.b.head(n) = sys.r.real();
    out.b.tail(n) = sys.r.imag();
    return out;
}

Factorization::Factorization()
    : lu_(std::make_unique<Eigen::SparseLU<SparseRealMatrix, Eigen::COLAMDOrdering<int>>>()) {}

void Factorization::analyze_pattern(const SparseRealMatrix& M) {
    lu_->analyzePattern(M);
    analyzed_ = true;
    factorized_ = false;
}

namespace {

// Eigen reports singular pivots only through its message text; pull out the
// trailing column index when present.
int pivot_from_message(const std::string& msg) {
    int end = static_cast<int>(msg.size());
    while (end > 0 && std::isspace(static_cast<unsigned char>(msg[end - 1]))) --end;
    int begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(msg[begin - 1]))) --begin;
    if (begin == end) return -1;
    return std::stoi(msg.substr(begin, end - begin));
}

}  // namespace

void Factorization::factorize(const SparseRealMatrix& M) {
    if (!analyzed_) analyze_pattern(M);
    lu_->factorize(M);
    if (lu_->info() != Eigen::Success) {
        const std::string msg = lu_->lastErrorMessage();
        throw SingularMatrixError(pivot_from_message(msg),
                                  "sparse LU factorization failed: " + msg);
    }
    factorized_ = true;
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
    if (!factorized_) throw Error("Factorization::solve called before factorize");
    Eigen::VectorXd x = lu_->solve(b);
    if (lu_->info() != Eigen::Success) throw Error("sparse LU solve failed");
    return x;
}

Factorization factorize(const RealifiedSystem& sys) {
    Factorization f;
    f.factorize(sys.M);
    return f;
}

ComplexVector block_residual(const ConjugateBlockSystem& sys, const ComplexVector& dV) {
    return sys.r - (sys.A * dV + sys.B.cwiseProduct(dV.conjugate()));
}

ComplexVector solve_conjugate_block(const ConjugateBlockSystem& sys, Factorization* reuse,
                                    double residual_tol) {
    const int n = static_cast<int>(sys.r.size());
    const RealifiedSystem rs = realify(sys);

    Factorization local;
    Factorization& f = reuse ? *reuse : local;
    f.factorize(rs.M);
    const Eigen::VectorXd xy = f.solve(rs.b);

    ComplexVector dV(n);
    dV.real() = xy.head(n);
    dV.imag() = xy.tail(n);

    const double res = block_residual(sys, dV).lpNorm<Eigen::Infinity>();
    const double rel = res / (1.0 + sys.r.lpNorm<Eigen::Infinity>());
    if (!(rel < residual_tol))
        throw NumericalQualityError(rel, "conjugate-block solve residual " + std::to_string(rel) +
                                             " exceeds " + std::to_string(residual_tol));
    return dV;
}

}  // namespace wflow
