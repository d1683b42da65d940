#include "fuelctl/problems.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "fuelctl/errors.hpp"

namespace fuelctl {

namespace {

std::string str(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(field, "must be positive, got " + str(value));
    }
}

void require_finite(double value, const char* field) {
    if (!std::isfinite(value)) throw InvalidParameter(field, "must be finite");
}

}  // namespace

ControlBounds::ControlBounds(double a_lower, double a_upper) : lower_(a_lower), upper_(a_upper) {
    require_finite(a_lower, "a_lower");
    require_finite(a_upper, "a_upper");
    if (a_lower > 0.0) throw InvalidParameter("a_lower", "must be <= 0, got " + str(a_lower));
    if (a_upper < 0.0) throw InvalidParameter("a_upper", "must be >= 0, got " + str(a_upper));
}

RunningReward RunningReward::constant(double value) {
    require_finite(value, "reward");
    RunningReward r;
    r.constant_ = value;
    r.lower_ = value;
    r.upper_ = value;
    return r;
}

RunningReward::RunningReward(Fn fn, double lower, double upper) : fn_(std::move(fn)), lower_(lower), upper_(upper) {
    if (!fn_) throw InvalidParameter("reward", "empty function");
    if (!(lower <= upper)) throw InvalidParameter("reward", "lower bound exceeds upper bound");
}

// ---------------------------------------------------------------------------

CorrectionProblem::CorrectionProblem(const CorrectionParams& p, RunningReward reward)
    : k_(p.k), sigma_(p.sigma), l_(p.l), beta_(p.beta), y_max_(p.y_max), offset_(p.drift_offset),
      bounds_(p.a_lower, p.a_upper), reward_(std::move(reward)) {
    require_finite(p.k, "k");
    require_positive(p.sigma, "sigma");
    require_positive(p.l, "l");
    require_positive(p.beta, "beta");
    require_positive(p.y_max, "y_max");
    require_finite(p.drift_offset, "drift_offset");
}

CorrectionParams CorrectionProblem::params() const {
    return {k_, sigma_, l_, beta_, bounds_.lower(), bounds_.upper(), y_max_, offset_};
}

double CorrectionProblem::drift_bound() const { return std::abs(k_) * l_ + std::abs(offset_); }

double drift2(const CorrectionProblem& problem, double x, double a) {
    if (!problem.bounds().contains(a)) {
        throw InvalidControl("control " + str(a) + " outside [" + str(problem.bounds().lower()) + ", " +
                             str(problem.bounds().upper()) + "]");
    }
    return -problem.k() * x + problem.drift_offset() - a;
}

// ---------------------------------------------------------------------------

TrackingProblem::TrackingProblem(const TrackingParams& p, RunningReward reward)
    : k_(p.k), sigma_(p.sigma), b_sat_(p.b_sat), l_(p.l), beta_(p.beta), y_max_(p.y_max), x_max_(p.x_max),
      bounds_(p.a_lower, p.a_upper), reward_(std::move(reward)) {
    require_finite(p.k, "k");
    require_positive(p.sigma, "sigma");
    require_positive(p.b_sat, "b_sat");
    require_positive(p.l, "l");
    require_positive(p.beta, "beta");
    require_positive(p.y_max, "y_max");
    require_positive(p.x_max, "x_max");
    if (!(p.x_max > p.b_sat)) throw InvalidParameter("x_max", "must exceed b_sat");
}

TrackingParams TrackingProblem::params() const {
    return {k_, sigma_, b_sat_, l_, beta_, bounds_.lower(), bounds_.upper(), y_max_, x_max_};
}

double TrackingProblem::drift_bound() const { return std::abs(k_) * b_sat_; }

double mu(const TrackingProblem& problem, double x1) {
    return -problem.k() * std::clamp(x1, -problem.b_sat(), problem.b_sat());
}

}  // namespace fuelctl
