#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when tensor shapes do not compose.
class ShapeError : public Error {
public:
    using Error::Error;
};

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t element_count(const Shape& shape);

/// Dense row-major array of doubles.
///
/// Activations are (channels x length) or flat; parameters use whatever
/// rank the owning layer needs. The element count always equals the
/// product of the shape.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> values);

    /// Flat rank-1 tensor.
    static Tensor vector(std::vector<double> values);
    /// Single-channel (1 x n) tensor.
    static Tensor row(std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Element (channel, position) of a rank-2 tensor.
    double& at(std::size_t channel, std::size_t position) noexcept
    {
        return values_[channel * shape_[1] + position];
    }
    double at(std::size_t channel, std::size_t position) const noexcept
    {
        return values_[channel * shape_[1] + position];
    }

    /// Same data viewed under a new shape with the same element count.
    Tensor reshaped(Shape shape) const;
    void reshape(Shape shape);

    void fill(double value);
    bool all_finite() const noexcept;
    double sum() const noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> values_;
};

/// Throws ShapeError with `what` as context unless `actual == expected`.
void require_shape(const Tensor& tensor, const Shape& expected, const char* what);

} // namespace specnet
