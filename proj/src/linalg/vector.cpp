#include "foldcont/linalg/vector.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace foldcont {

namespace {

void require_finite(std::span<const double> values)
{
    if (!all_finite(values)) throw std::invalid_argument("Vector: non-finite entry");
}

void require_same_size(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("Vector: dimension mismatch");
}

}  // namespace

Vector::Vector(std::size_t n, double value) : data_(n, value) { require_finite(data_); }

Vector::Vector(std::initializer_list<double> values) : data_(values) { require_finite(data_); }

Vector::Vector(std::vector<double> values) : data_(std::move(values)) { require_finite(data_); }

Vector& Vector::operator+=(const Vector& other)
{
    require_same_size(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& other)
{
    require_same_size(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Vector& Vector::operator*=(double scale)
{
    for (auto& x : data_) x *= scale;
    return *this;
}

Vector& Vector::operator/=(double scale)
{
    for (auto& x : data_) x /= scale;
    return *this;
}

Vector& Vector::axpy(double scale, const Vector& other)
{
    require_same_size(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
    return *this;
}

double dot(const Vector& a, const Vector& b)
{
    require_same_size(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a)
{
    // scaled to survive the 1e3..1e5 magnitudes of large-amplitude solutions
    double scale = norm_inf(a);
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : a) {
        const double y = x / scale;
        s += y * y;
    }
    return scale * std::sqrt(s);
}

double norm_inf(const Vector& a)
{
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

double distance(const Vector& a, const Vector& b) { return norm2(a - b); }

double distance_inf(const Vector& a, const Vector& b) { return norm_inf(a - b); }

Vector unit_vector(std::size_t n, std::size_t i)
{
    Vector e(n);
    e[i] = 1.0;
    return e;
}

bool all_finite(std::span<const double> values) noexcept
{
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

Vector normalized(const Vector& v)
{
    const double n = norm2(v);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return v / n;
}

Vector append(const Vector& u, double t)
{
    std::vector<double> z(u.begin(), u.end());
    z.push_back(t);
    return Vector(std::move(z));
}

}  // namespace foldcont
