#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>

namespace fuelctl {

/// Admissible intensities [a_lower, a_upper] with a_lower <= 0 <= a_upper.
class ControlBounds {
public:
    ControlBounds(double a_lower, double a_upper);

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double max_abs() const { return std::max(-lower_, upper_); }
    bool contains(double a) const { return a >= lower_ && a <= upper_; }
    bool is_trivial() const { return lower_ == 0.0 && upper_ == 0.0; }

private:
    double lower_;
    double upper_;
};

/// Running reward f(x, a). The built-in problems use f == 1.
///
/// The control minimisation inside the scheme only inspects f at the
/// breakpoints of the piecewise-linear Hamiltonian, so it is exact when
/// f(x, .) is convex between consecutive breakpoints (constants and affine
/// functions qualify).
class RunningReward {
public:
    using Fn = std::function<double(std::span<const double> x, double a)>;

    static RunningReward constant(double value);
    /// `lower`/`upper` must bound fn over the domain and control set.
    RunningReward(Fn fn, double lower, double upper);

    bool is_constant() const { return constant_.has_value(); }
    double constant_value() const { return constant_.value_or(0.0); }
    double operator()(std::span<const double> x, double a) const { return constant_ ? *constant_ : fn_(x, a); }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

private:
    RunningReward() = default;

    std::optional<double> constant_;
    Fn fn_;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

struct CorrectionParams {
    double k = 2.0;
    double sigma = 0.8;
    double l = 1.0;
    double beta = 0.1;
    double a_lower = -10.0;
    double a_upper = 10.0;
    double y_max = 40.0;
    /// Constant added to the uncontrolled drift: dX = (-k X + drift_offset - a) dt + sigma dW.
    /// Zero for the correction family; the tracking face reduction uses it.
    double drift_offset = 0.0;
};

/// dX = (-k X + c - a) dt + sigma dW on G = (-l, l), dY = -|a| dt.
class CorrectionProblem {
public:
    explicit CorrectionProblem(const CorrectionParams& params,
                               RunningReward reward = RunningReward::constant(1.0));

    double k() const { return k_; }
    double sigma() const { return sigma_; }
    double l() const { return l_; }
    double beta() const { return beta_; }
    double y_max() const { return y_max_; }
    double drift_offset() const { return offset_; }
    const ControlBounds& bounds() const { return bounds_; }
    const RunningReward& reward() const { return reward_; }
    CorrectionParams params() const;

    /// Upper bound of |uncontrolled drift| over [-l, l].
    double drift_bound() const;

private:
    double k_;
    double sigma_;
    double l_;
    double beta_;
    double y_max_;
    double offset_;
    ControlBounds bounds_;
    RunningReward reward_;
};

struct TrackingParams {
    double k = 0.3;
    double sigma = 0.8;
    double b_sat = 2.5;
    double l = 2.8284271247461903;  // 4 / sqrt(2)
    double beta = 0.1;
    double a_lower = -1.0;
    double a_upper = 1.0;
    double y_max = 10.0;
    double x_max = 80.0;
};

/// Target dX1 = mu(X1) dt + sigma dW, tracker dX2 = a dt, dY = -|a| dt,
/// G = {|x1 - x2| < l}; x_max bounds |x1 + x2| artificially.
class TrackingProblem {
public:
    explicit TrackingProblem(const TrackingParams& params,
                             RunningReward reward = RunningReward::constant(1.0));

    double k() const { return k_; }
    double sigma() const { return sigma_; }
    double b_sat() const { return b_sat_; }
    double l() const { return l_; }
    double beta() const { return beta_; }
    double y_max() const { return y_max_; }
    double x_max() const { return x_max_; }
    const ControlBounds& bounds() const { return bounds_; }
    const RunningReward& reward() const { return reward_; }
    TrackingParams params() const;

    /// sup |mu| = |k| * b_sat.
    double drift_bound() const;

private:
    double k_;
    double sigma_;
    double b_sat_;
    double l_;
    double beta_;
    double y_max_;
    double x_max_;
    ControlBounds bounds_;
    RunningReward reward_;
};

/// Clipped-linear target drift: -k * clamp(x1, -b, b).
double mu(const TrackingProblem& problem, double x1);

/// Controlled drift of the correction family; throws InvalidControl when a is
/// outside the bounds.
double drift2(const CorrectionProblem& problem, double x, double a);

}  // namespace fuelctl
