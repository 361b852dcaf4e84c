#pragma once

#include <algorithm>
#include <cmath>

namespace layopt {

/// Continuous 2D point in pixel units.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// 2D displacement / force vector.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Clamp a point to the image rectangle [0,w] x [0,h].
inline Point2 clamp_to_rect(Point2 p, double w, double h) {
    return {std::clamp(p.x, 0.0, w), std::clamp(p.y, 0.0, h)};
}

/// Compensated (Kahan) accumulator for long pixel sums.
class KahanSum {
public:
    void add(double v) {
        double y = v - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace layopt
