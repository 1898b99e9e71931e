#include "falab/matrix.hpp"

#include <cmath>

namespace falab {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.cols() == b.rows());
    if (out.rows() != a.rows() || out.cols() != b.cols()) {
        out = Matrix(a.rows(), b.cols());
    } else {
        out.fill(0.0);
    }
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        const double* __restrict__ arow = a.row(i);
        double* __restrict__ orow = out.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* __restrict__ brow = b.row(p);
            for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
    assert(a.rows() == b.rows());
    if (out.rows() != a.cols() || out.cols() != b.cols()) {
        out = Matrix(a.cols(), b.cols());
    } else {
        out.fill(0.0);
    }
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        const double* __restrict__ arow = a.row(i);
        const double* __restrict__ brow = b.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            double* __restrict__ orow = out.row(p);
            for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

double squared_norm(const Matrix& m) {
    double s = 0.0;
    const double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) s += d[i] * d[i];
    return s;
}

bool all_finite(const Matrix& m) {
    const double* d = m.data();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!std::isfinite(d[i])) return false;
    }
    return true;
}

}  // namespace falab
