#include "vts/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "vts/errors.hpp"

namespace vts {

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    for (const auto& row : init) {
        if (row.size() != cols_) throw ContractError("CostMatrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

namespace {

bool forbidden(double c) {
    return c >= kForbiddenCost;
}

// Shortest augmenting path with potentials on an n x m matrix, n <= m.
// Returns col_of_row.
std::vector<std::size_t> solve(const std::vector<double>& a, std::size_t n, std::size_t m) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0);
    std::vector<std::size_t> way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> col_of_row(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
    }
    return col_of_row;
}

}  // namespace

Assignment assign(const CostMatrix& cost) {
    const std::size_t rows = cost.rows();
    const std::size_t cols = cost.cols();
    if (rows == 0 || cols == 0) return {};

    double max_abs = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = cost(r, c);
            if (std::isnan(x) || x == -std::numeric_limits<double>::infinity()) {
                throw ContractError("assign: costs must be finite or the forbidden sentinel");
            }
            if (!forbidden(x)) max_abs = std::max(max_abs, std::abs(x));
        }
    }
    // Any single forbidden pair outweighs every total over permitted pairs.
    const double big = 1.0 + 2.0 * double(std::max(rows, cols)) * (max_abs + 1.0);

    const bool transpose = rows > cols;
    const std::size_t n = transpose ? cols : rows;
    const std::size_t m = transpose ? rows : cols;
    std::vector<double> a(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double x = transpose ? cost(j, i) : cost(i, j);
            a[i * m + j] = forbidden(x) ? big : x;
        }
    }
    const auto col_of_row = solve(a, n, m);

    Assignment out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = transpose ? col_of_row[i] : i;
        const std::size_t c = transpose ? i : col_of_row[i];
        if (!forbidden(cost(r, c))) out.emplace_back(r, c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double assignment_cost(const CostMatrix& cost, const Assignment& a) {
    double s = 0.0;
    for (const auto& [r, c] : a) s += cost(r, c);
    return s;
}

}  // namespace vts
