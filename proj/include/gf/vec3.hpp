#ifndef GF_VEC3_HPP
#define GF_VEC3_HPP

#include <cmath>

namespace gf {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Any unit vector orthogonal to a given (nonzero) v.
inline Vec3 orthogonal_unit(const Vec3& v) {
    Vec3 w = std::fabs(v.x) < 0.9 * v.norm() ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = w - v * (w.dot(v) / v.norm2());
    return u.normalized();
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

}  // namespace gf

#endif
