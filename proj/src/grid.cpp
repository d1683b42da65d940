#include "fuelctl/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "fuelctl/errors.hpp"

namespace fuelctl {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(field, "must be a positive finite number, got " + std::to_string(value));
    }
}

}  // namespace

Grid2::Grid2(double l, double y_max, int I, int J, bool fuel_axis)
    : l_(l), y_max_(y_max), h1_(l / I), h2_(fuel_axis ? y_max / J : 0.0), I_(I), J_(J), fuel_axis_(fuel_axis) {
    kinds_.resize(size());
    for (int j = 0; j <= J_; ++j) {
        for (int i = -I_; i <= I_; ++i) {
            const bool interior = i > -I_ && i < I_ && (fuel_axis_ ? j > 0 : true);
            kinds_[index(i, j)] = interior ? NodeKind::interior : NodeKind::boundary;
        }
    }
}

Grid2 Grid2::build(double l, double y_max, int I, int J) {
    require_positive(l, "l");
    require_positive(y_max, "y_max");
    if (I < 2) throw InvalidParameter("I", "needs at least 2 nodes per half-width, got " + std::to_string(I));
    if (J < 1) throw InvalidParameter("J", "needs at least 1 fuel step, got " + std::to_string(J));
    return Grid2(l, y_max, I, J, true);
}

Grid2 Grid2::spatial(double l, int I) {
    require_positive(l, "l");
    if (I < 2) throw InvalidParameter("I", "needs at least 2 nodes per half-width, got " + std::to_string(I));
    return Grid2(l, 0.0, I, 0, false);
}

std::size_t Grid2::at(int i, int j) const {
    if (!contains(i, j)) {
        throw IndexError("node (" + std::to_string(i) + ", " + std::to_string(j) + ") is off the grid");
    }
    return index(i, j);
}

Grid2::Node Grid2::node(std::size_t n) const {
    if (n >= size()) throw IndexError("node index " + std::to_string(n) + " out of range");
    const auto row = static_cast<std::size_t>(nx());
    return {static_cast<int>(n % row) - I_, static_cast<int>(n / row)};
}

NodeKind Grid2::classify(int i, int j) const { return kinds_[at(i, j)]; }

// ---------------------------------------------------------------------------

Grid3::Grid3(double l, double x_max, double y_max, int m, int K, bool fuel_axis)
    : l_(l), x_max_(x_max), y_max_(y_max), h_(l / m), h3_(fuel_axis ? y_max / K : 0.0), m_(m), K_(K),
      fuel_axis_(fuel_axis) {
    // Tolerance keeps x_max = n*h from losing its last node to rounding.
    n_sum_ = static_cast<int>(std::floor(x_max / h_ + 1e-9));
    row_half_ = (n_sum_ + m_) / 2;
    kinds_.resize(size());
    for (int k = 0; k <= K_; ++k) {
        for (int j = -row_half_; j <= row_half_; ++j) {
            for (int q = 0; q <= 2 * m_; ++q) {
                const int i = q + j - m_;
                const NodeKind kind = compute_kind(i, j, k);
                kinds_[index(i, j, k)] = kind;
                if (kind != NodeKind::inactive) ++active_count_;
            }
        }
    }
}

Grid3 Grid3::build(double l, double x_max, double y_max, int half_across, int fuel_layers) {
    require_positive(l, "l");
    require_positive(x_max, "x_max");
    require_positive(y_max, "y_max");
    if (half_across < 2) {
        throw InvalidParameter("half_across", "needs at least 2 nodes per half-width, got " + std::to_string(half_across));
    }
    if (fuel_layers < 1) {
        throw InvalidParameter("fuel_layers", "needs at least 1 fuel step, got " + std::to_string(fuel_layers));
    }
    if (x_max < 2.0 * l / half_across) throw InvalidParameter("x_max", "shorter than two lattice steps");
    return Grid3(l, x_max, y_max, half_across, fuel_layers, true);
}

Grid3 Grid3::spatial(double l, double x_max, int half_across) {
    require_positive(l, "l");
    require_positive(x_max, "x_max");
    if (half_across < 2) {
        throw InvalidParameter("half_across", "needs at least 2 nodes per half-width, got " + std::to_string(half_across));
    }
    if (x_max < 2.0 * l / half_across) throw InvalidParameter("x_max", "shorter than two lattice steps");
    return Grid3(l, x_max, 0.0, half_across, 0, false);
}

bool Grid3::in_box(int i, int j, int k) const {
    return k >= 0 && k <= K_ && j >= -row_half_ && j <= row_half_ && std::abs(i - j) <= m_;
}

NodeKind Grid3::compute_kind(int i, int j, int k) const {
    const int sum = std::abs(i + j);
    if (sum > n_sum_) return NodeKind::inactive;
    if (std::abs(i - j) == m_ || sum == n_sum_) return NodeKind::boundary;
    if (fuel_axis_ && k == 0) return NodeKind::boundary;
    return NodeKind::interior;
}

std::size_t Grid3::at(int i, int j, int k) const {
    if (!in_box(i, j, k) || kinds_[index(i, j, k)] == NodeKind::inactive) {
        throw IndexError("node (" + std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) +
                         ") is off the grid");
    }
    return index(i, j, k);
}

Grid3::Node Grid3::node(std::size_t n) const {
    if (n >= size()) throw IndexError("node index " + std::to_string(n) + " out of range");
    const int k = static_cast<int>(n / layer_stride());
    const std::size_t rem = n % layer_stride();
    const int j = static_cast<int>(rem / row_stride()) - row_half_;
    const int q = static_cast<int>(rem % row_stride());
    return {q + j - m_, j, k};
}

NodeKind Grid3::classify(int i, int j, int k) const { return kinds_[at(i, j, k)]; }

// ---------------------------------------------------------------------------

bool MeshFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fuelctl
