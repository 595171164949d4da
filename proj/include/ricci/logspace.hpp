#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace ricci {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), tolerant of -inf arguments.
inline double logaddexp(double a, double b) {
    if (a == kLogZero) return b;
    if (b == kLogZero) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// log(e^a - e^b) for a > b.
inline double logdiffexp(double a, double b) {
    if (b == kLogZero) return a;
    return a + std::log1p(-std::exp(b - a));
}

/// A positive quantity stored by its natural logarithm, so constant chains
/// that overflow double (Sobolev constants at small kappa blow past 1e308)
/// stay exact in the ledger.
class PosReal {
public:
    PosReal() : log_(kLogZero) {}
    static PosReal from_value(double v) {
        PosReal p;
        p.log_ = v > 0.0 ? std::log(v) : kLogZero;
        return p;
    }
    static PosReal from_log(double lg) {
        PosReal p;
        p.log_ = lg;
        return p;
    }

    double log() const { return log_; }
    double value() const { return std::exp(log_); }  // may round to 0 or inf
    double log10() const { return log_ / std::numbers::ln10; }
    bool is_zero() const { return log_ == kLogZero; }

    friend PosReal operator*(PosReal a, PosReal b) { return from_log(a.log_ + b.log_); }
    friend PosReal operator/(PosReal a, PosReal b) { return from_log(a.log_ - b.log_); }
    friend PosReal operator+(PosReal a, PosReal b) {
        return from_log(logaddexp(a.log_, b.log_));
    }
    friend bool operator<(PosReal a, PosReal b) { return a.log_ < b.log_; }
    friend bool operator<=(PosReal a, PosReal b) { return a.log_ <= b.log_; }
    friend bool operator>(PosReal a, PosReal b) { return a.log_ > b.log_; }
    friend bool operator>=(PosReal a, PosReal b) { return a.log_ >= b.log_; }

    PosReal pow(double e) const { return from_log(e * log_); }

private:
    double log_;
};

inline PosReal pos(double v) { return PosReal::from_value(v); }

}  // namespace ricci
