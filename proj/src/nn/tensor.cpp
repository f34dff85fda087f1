#include "specnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace specnet {

std::string to_string(const Shape& shape)
{
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) {
            out += "x";
        }
        out += std::to_string(shape[i]);
    }
    out += "]";
    return out;
}

std::size_t element_count(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill)
{
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values))
{
    if (element_count(shape_) != values_.size()) {
        throw ShapeError("tensor shape " + to_string(shape_) + " does not match " +
                         std::to_string(values_.size()) + " values");
    }
}

Tensor Tensor::vector(std::vector<double> values)
{
    Shape shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::row(std::vector<double> values)
{
    Shape shape{1, values.size()};
    return Tensor(std::move(shape), std::move(values));
}

std::size_t Tensor::dim(std::size_t axis) const
{
    if (axis >= shape_.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                         to_string(shape_));
    }
    return shape_[axis];
}

Tensor Tensor::reshaped(Shape shape) const
{
    Tensor out = *this;
    out.reshape(std::move(shape));
    return out;
}

void Tensor::reshape(Shape shape)
{
    if (element_count(shape) != values_.size()) {
        throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
    }
    shape_ = std::move(shape);
}

void Tensor::fill(double value)
{
    std::fill(values_.begin(), values_.end(), value);
}

bool Tensor::all_finite() const noexcept
{
    for (double v : values_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

double Tensor::sum() const noexcept
{
    double total = 0.0;
    for (double v : values_) {
        total += v;
    }
    return total;
}

void require_shape(const Tensor& tensor, const Shape& expected, const char* what)
{
    if (tensor.shape() != expected) {
        throw ShapeError(std::string(what) + ": expected shape " + to_string(expected) + ", got " +
                         to_string(tensor.shape()));
    }
}

} // namespace specnet
