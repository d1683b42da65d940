#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fuelctl {

enum class NodeKind : std::uint8_t { interior, boundary, inactive };

/// Lattice for the one-dimensional state plus fuel:
/// nodes (i*h1, j*h2), -I <= i <= I, 0 <= j <= J.
///
/// Storage is row-major with the fuel index outermost, so each fuel layer is
/// a contiguous run of 2I+1 values. A grid built with `spatial()` has a single
/// layer and no fuel axis (the infinite-fuel problem lives there).
class Grid2 {
public:
    struct Node {
        int i;
        int j;
    };

    /// Throws InvalidParameter unless l > 0, y_max > 0, I >= 2, J >= 1.
    static Grid2 build(double l, double y_max, int I, int J);
    static Grid2 spatial(double l, int I);

    double l() const { return l_; }
    double y_max() const { return y_max_; }
    double h1() const { return h1_; }
    double h2() const { return h2_; }
    int I() const { return I_; }
    int J() const { return J_; }
    bool has_fuel_axis() const { return fuel_axis_; }

    int nx() const { return 2 * I_ + 1; }
    int layers() const { return J_ + 1; }
    std::size_t size() const { return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(layers()); }

    double x(int i) const { return i * h1_; }
    double y(int j) const { return j * h2_; }

    bool contains(int i, int j) const { return i >= -I_ && i <= I_ && j >= 0 && j <= J_; }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx()) + static_cast<std::size_t>(i + I_);
    }
    /// Checked variant of index(); throws IndexError off the grid.
    std::size_t at(int i, int j) const;
    Node node(std::size_t n) const;

    /// Throws IndexError for off-grid nodes.
    NodeKind classify(int i, int j) const;
    NodeKind kind(std::size_t n) const { return kinds_[n]; }
    std::span<const NodeKind> kinds() const { return kinds_; }

private:
    Grid2(double l, double y_max, int I, int J, bool fuel_axis);

    double l_ = 0.0;
    double y_max_ = 0.0;
    double h1_ = 0.0;
    double h2_ = 0.0;
    int I_ = 0;
    int J_ = 0;
    bool fuel_axis_ = true;
    std::vector<NodeKind> kinds_;
};

/// Lattice for the tracking problem: nodes (i*h, j*h, k*h3) inside the strip
/// |x1 - x2| <= l, |x1 + x2| <= x_max, 0 <= y <= y_max.
///
/// The spatial steps coincide (h1 == h2 == l/m) so both lateral faces
/// |x1 - x2| = l pass through lattice nodes. Nodes are stored in a sheared
/// dense box (k, j, q) with q = i - j + m in [0, 2m]; the ends of the strip
/// that fall outside |x1 + x2| <= x_max are masked as inactive. Neighbour
/// offsets are constant: (i+-1, j) -> +-1, (i, j+-1) -> +-(row_stride - 1),
/// (i, j, k-1) -> -layer_stride.
class Grid3 {
public:
    struct Node {
        int i;
        int j;
        int k;
    };

    /// `half_across` = m nodes from the centre line to each lateral face,
    /// `fuel_layers` = K fuel steps. Throws InvalidParameter.
    static Grid3 build(double l, double x_max, double y_max, int half_across, int fuel_layers);
    static Grid3 spatial(double l, double x_max, int half_across);

    double l() const { return l_; }
    double x_max() const { return x_max_; }
    double y_max() const { return y_max_; }
    double h1() const { return h_; }
    double h2() const { return h_; }
    double h3() const { return h3_; }
    int m() const { return m_; }
    int K() const { return K_; }
    /// Largest |i + j| on the grid; the artificial faces sit at |i + j| == sum_bound().
    int sum_bound() const { return n_sum_; }
    int row_min() const { return -row_half_; }
    int row_max() const { return row_half_; }
    int rows() const { return 2 * row_half_ + 1; }
    int layers() const { return K_ + 1; }
    bool has_fuel_axis() const { return fuel_axis_; }

    std::size_t row_stride() const { return static_cast<std::size_t>(2 * m_ + 1); }
    std::size_t layer_stride() const { return row_stride() * static_cast<std::size_t>(rows()); }
    std::size_t size() const { return layer_stride() * static_cast<std::size_t>(layers()); }
    std::size_t active_count() const { return active_count_; }

    double x1(int i) const { return i * h_; }
    double x2(int j) const { return j * h_; }
    double y(int k) const { return k * h3_; }
    static double z1(double x1, double x2) { return (x1 + x2) / std::sqrt(2.0); }
    static double z2(double x1, double x2) { return (x1 - x2) / std::sqrt(2.0); }

    /// True when (i, j, k) lies in the dense box (possibly masked).
    bool in_box(int i, int j, int k) const;
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(k) * layer_stride() +
               static_cast<std::size_t>(j + row_half_) * row_stride() + static_cast<std::size_t>(i - j + m_);
    }
    std::size_t at(int i, int j, int k) const;
    Node node(std::size_t n) const;

    NodeKind classify(int i, int j, int k) const;
    NodeKind kind(std::size_t n) const { return kinds_[n]; }
    std::span<const NodeKind> kinds() const { return kinds_; }

private:
    Grid3(double l, double x_max, double y_max, int m, int K, bool fuel_axis);
    NodeKind compute_kind(int i, int j, int k) const;

    double l_ = 0.0;
    double x_max_ = 0.0;
    double y_max_ = 0.0;
    double h_ = 0.0;
    double h3_ = 0.0;
    int m_ = 0;
    int K_ = 0;
    int n_sum_ = 0;
    int row_half_ = 0;
    bool fuel_axis_ = true;
    std::size_t active_count_ = 0;
    std::vector<NodeKind> kinds_;
};

/// One real value per node of a grid (inactive Grid3 nodes included and held at 0).
class MeshFunction {
public:
    MeshFunction() = default;
    explicit MeshFunction(std::size_t n, double fill = 0.0) : values_(n, fill) {}
    explicit MeshFunction(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool all_finite() const;

    friend bool operator==(const MeshFunction&, const MeshFunction&) = default;

private:
    std::vector<double> values_;
};

}  // namespace fuelctl
