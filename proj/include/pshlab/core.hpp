#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace pshlab {

template <class Scalar = double>
using Complex = std::complex<Scalar>;

/// Point in C^n stored as 2n real coordinates (x1, y1, x2, y2, ...).
template <class Scalar = double>
using PointX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
Complex<Scalar> coord(const PointX<Scalar>& p, int j) {
    return Complex<Scalar>(p[2 * j], p[2 * j + 1]);
}

template <class Scalar>
PointX<Scalar> make_point(std::initializer_list<Complex<Scalar>> zs) {
    PointX<Scalar> p(2 * static_cast<int>(zs.size()));
    int j = 0;
    for (const auto& z : zs) {
        p[2 * j] = z.real();
        p[2 * j + 1] = z.imag();
        ++j;
    }
    return p;
}

inline PointX<double> point_c1(std::complex<double> z) { return make_point<double>({z}); }
inline PointX<double> point_c2(std::complex<double> z, std::complex<double> w) {
    return make_point<double>({z, w});
}

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are bit-stable across thread counts.
template <class Scalar>
Scalar pairwise_sum(std::span<const Scalar> x) {
    const std::size_t n = x.size();
    if (n <= 16) {
        Scalar s = Scalar(0);
        for (const Scalar& v : x) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

template <class Scalar>
Scalar pairwise_sum(const std::vector<Scalar>& x) {
    return pairwise_sum(std::span<const Scalar>(x));
}

namespace detail {
inline int& thread_count_ref() {
    static int n = 0;  // 0 = hardware concurrency
    return n;
}
}  // namespace detail

inline void set_thread_count(int n) { detail::thread_count_ref() = n; }

inline int thread_count() {
    int n = detail::thread_count_ref();
    if (n > 0) return n;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Chunked parallel loop over [0, n). Each worker writes disjoint indices;
/// callers must not reduce inside fn (use pairwise_sum on the result array).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int nt = thread_count();
    if (nt <= 1 || n < 4096) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> workers;
    workers.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = std::min(n, t * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] { fn(lo, hi); });
    }
    for (auto& w : workers) w.join();
}

/// Deterministic 64-bit RNG (splitmix64) with an explicit uniform mapping,
/// so streams do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

/// FNV-1a hash of a byte string; used to stamp outputs with a config digest.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pshlab
