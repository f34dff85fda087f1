#pragma once

// Reference implementations used as test oracles. They are deliberately
// naive and share no code with the library kernels.

#include "specnet/rng.hpp"
#include "specnet/tensor.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using specnet::Tensor;

inline std::vector<double> values_of(const Tensor& t)
{
    return {t.values().begin(), t.values().end()};
}

inline Tensor random_tensor(specnet::Rng& rng, specnet::Shape shape, double lo = -1.0,
                            double hi = 1.0)
{
    Tensor t(std::move(shape));
    for (double& v : t.values()) {
        v = rng.uniform(lo, hi);
    }
    return t;
}

// Zero-pads explicitly, then slides the kernel.
inline Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias, bool same)
{
    const std::size_t cin = input.dim(0);
    const std::size_t len = input.dim(1);
    const std::size_t cout = kernel.dim(0);
    const std::size_t k = kernel.dim(2);
    const std::size_t left = same ? (k - 1) / 2 : 0;
    const std::size_t right = same ? k - 1 - left : 0;
    const std::size_t padded_len = len + left + right;
    std::vector<std::vector<double>> padded(cin, std::vector<double>(padded_len, 0.0));
    for (std::size_t c = 0; c < cin; ++c) {
        for (std::size_t i = 0; i < len; ++i) {
            padded[c][left + i] = input.at(c, i);
        }
    }
    const std::size_t out_len = padded_len - k + 1;
    Tensor out({cout, out_len});
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t t = 0; t < out_len; ++t) {
            double acc = bias[o];
            for (std::size_t c = 0; c < cin; ++c) {
                for (std::size_t j = 0; j < k; ++j) {
                    acc += padded[c][t + j] * kernel[(o * cin + c) * k + j];
                }
            }
            out.at(o, t) = acc;
        }
    }
    return out;
}

inline Tensor maxpool1d(const Tensor& input, std::size_t pool)
{
    const std::size_t channels = input.dim(0);
    const std::size_t out_len = input.dim(1) / pool;
    Tensor out({channels, out_len});
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t t = 0; t < out_len; ++t) {
            double best = input.at(c, t * pool);
            for (std::size_t j = 1; j < pool; ++j) {
                if (input.at(c, t * pool + j) > best) {
                    best = input.at(c, t * pool + j);
                }
            }
            out.at(c, t) = best;
        }
    }
    return out;
}

inline Tensor dense(const Tensor& input, const Tensor& weight, const Tensor& bias)
{
    const std::size_t m = weight.dim(0);
    const std::size_t n = weight.dim(1);
    Tensor out({m});
    for (std::size_t i = 0; i < m; ++i) {
        double acc = bias[i];
        for (std::size_t j = 0; j < n; ++j) {
            acc += weight[i * n + j] * input[j];
        }
        out[i] = acc;
    }
    return out;
}

// ------------------------------------------------------------ rationals

__extension__ typedef __int128 int128;

struct Fraction {
    int128 num = 0;
    int128 den = 1;

    static int128 gcd(int128 a, int128 b)
    {
        a = a < 0 ? -a : a;
        b = b < 0 ? -b : b;
        while (b != 0) {
            const int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    Fraction(int128 n = 0, int128 d = 1) : num(n), den(d)
    {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const int128 g = gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    friend Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Fraction operator-(Fraction a, Fraction b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
    friend Fraction operator/(Fraction a, Fraction b) { return {a.num * b.den, a.den * b.num}; }
    friend bool operator==(Fraction a, Fraction b) { return a.num == b.num && a.den == b.den; }

    /// Correctly rounded when numerator and denominator are exact doubles.
    double to_double() const { return static_cast<double>(static_cast<std::int64_t>(num)) /
                                      static_cast<double>(static_cast<std::int64_t>(den)); }
};

using Matrix = std::vector<std::vector<std::int64_t>>;

inline Fraction oa(const Matrix& m)
{
    std::int64_t total = 0;
    std::int64_t diag = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            total += m[i][j];
        }
        diag += m[i][i];
    }
    return {diag, total};
}

// Mean recall over classes that have true instances.
inline Fraction aa(const Matrix& m)
{
    Fraction sum;
    std::int64_t present = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::int64_t row = std::accumulate(m[i].begin(), m[i].end(), std::int64_t{0});
        if (row > 0) {
            sum = sum + Fraction(m[i][i], row);
            ++present;
        }
    }
    return sum / Fraction(present);
}

// (p_o - p_e) / (1 - p_e) with p_e from the marginals.
inline Fraction kappa(const Matrix& m)
{
    std::int64_t total = 0;
    for (const auto& row : m) {
        total += std::accumulate(row.begin(), row.end(), std::int64_t{0});
    }
    Fraction pe;
    for (std::size_t k = 0; k < m.size(); ++k) {
        std::int64_t row = 0;
        std::int64_t col = 0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            row += m[k][j];
            col += m[j][k];
        }
        pe = pe + Fraction(row, total) * Fraction(col, total);
    }
    const Fraction po = oa(m);
    return (po - pe) / (Fraction(1) - pe);
}

// ------------------------------------------------------------ texture classes

struct IPoint {
    long x; // clay %
    long y; // silt %
};

// Default boundary polygons on integer percent vertices, keyed by class char.
inline const std::vector<std::pair<char, std::vector<IPoint>>>& ka5_polygons()
{
    static const std::vector<std::pair<char, std::vector<IPoint>>> polys{
        {'T', {{45, 0}, {100, 0}, {45, 55}}},
        {'U', {{0, 65}, {30, 65}, {30, 70}, {0, 100}}},
        {'S', {{0, 0}, {17, 0}, {17, 25}, {8, 40}, {0, 40}}},
        {'L', {{0, 0}, {100, 0}, {0, 100}}},
    };
    return polys;
}

inline long cross(IPoint a, IPoint b, IPoint p)
{
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

inline bool on_segment(IPoint a, IPoint b, IPoint p)
{
    return cross(a, b, p) == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Winding number in exact integer arithmetic; boundary points count as inside.
inline bool inside(const std::vector<IPoint>& poly, IPoint p)
{
    int winding = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const IPoint a = poly[i];
        const IPoint b = poly[(i + 1) % poly.size()];
        if (on_segment(a, b, p)) {
            return true;
        }
        if (a.y <= p.y) {
            if (b.y > p.y && cross(a, b, p) > 0) {
                ++winding;
            }
        } else if (b.y <= p.y && cross(a, b, p) < 0) {
            --winding;
        }
    }
    return winding != 0;
}

inline char ka5_class(long clay, long silt)
{
    for (const auto& [cls, poly] : ka5_polygons()) {
        if (inside(poly, {clay, silt})) {
            return cls;
        }
    }
    return '?';
}

// ------------------------------------------------------------ architectures

// Parameter count and flatten width recomputed from the architecture table:
// conv blocks of (filters, kernel, same padding, pool), then dense layers.
struct ArchTable {
    std::size_t in_channels;
    std::vector<std::size_t> filters;
    std::size_t kernel;
    bool same;
    std::size_t pool;
    std::vector<std::size_t> hidden;
    bool concat_input;
};

struct ArchAudit {
    std::size_t flatten;
    std::size_t params;
};

inline ArchAudit audit(const ArchTable& a, std::size_t length = 256, std::size_t classes = 4)
{
    std::size_t params = 0;
    std::size_t channels = a.in_channels;
    std::size_t len = length;
    for (std::size_t f : a.filters) {
        params += f * channels * a.kernel + f;
        len = a.same ? len : len - a.kernel + 1;
        len /= a.pool;
        channels = f;
    }
    std::size_t width = channels * len + (a.concat_input ? length : 0);
    const std::size_t flatten = width;
    for (std::size_t h : a.hidden) {
        params += width * h + h;
        width = h;
    }
    params += width * classes + classes;
    return {flatten, params};
}

inline const std::vector<std::pair<std::string, ArchTable>>& arch_tables()
{
    static const std::vector<std::pair<std::string, ArchTable>> tables{
        {"lucas_cnn", {1, {32, 32, 64, 64}, 3, false, 2, {120, 160}, false}},
        {"lucas_resnet", {1, {32, 32, 64, 64}, 3, true, 2, {150, 100}, true}},
        {"lucas_coordconv", {2, {32, 64, 64, 128}, 3, false, 2, {256, 128}, false}},
        {"hu2015", {1, {20}, 28, false, 6, {100}, false}},
        {"liu2018", {1, {32, 32, 64, 64}, 3, false, 2, {}, false}},
    };
    return tables;
}

} // namespace oracle
