#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace foldcont {

/// Dense real vector. Constructors taking explicit values reject NaN/Inf;
/// arithmetic results are not re-checked.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double value = 0.0);
    Vector(std::initializer_list<double> values);
    explicit Vector(std::vector<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }
    [[nodiscard]] std::span<double> span() noexcept { return data_; }
    [[nodiscard]] std::span<const double> span() const noexcept { return data_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    Vector& operator+=(const Vector& other);
    Vector& operator-=(const Vector& other);
    Vector& operator*=(double scale);
    Vector& operator/=(double scale);

    /// this += scale * other
    Vector& axpy(double scale, const Vector& other);

    friend Vector operator+(Vector a, const Vector& b) { return a += b; }
    friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
    friend Vector operator-(Vector a)
    {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend Vector operator*(Vector a, double s) { return a *= s; }
    friend Vector operator*(double s, Vector a) { return a *= s; }
    friend Vector operator/(Vector a, double s) { return a /= s; }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> data_;
};

[[nodiscard]] double dot(const Vector& a, const Vector& b);
[[nodiscard]] double norm2(const Vector& a);
[[nodiscard]] double norm_inf(const Vector& a);
[[nodiscard]] double distance(const Vector& a, const Vector& b);
[[nodiscard]] double distance_inf(const Vector& a, const Vector& b);
[[nodiscard]] Vector unit_vector(std::size_t n, std::size_t i);
[[nodiscard]] bool all_finite(std::span<const double> values) noexcept;

/// Returns v / ||v||; throws std::invalid_argument on a zero vector.
[[nodiscard]] Vector normalized(const Vector& v);

/// Concatenation (u, t) used for points of the extended space X x R.
[[nodiscard]] Vector append(const Vector& u, double t);

}  // namespace foldcont
